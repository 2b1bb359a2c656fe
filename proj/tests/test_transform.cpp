#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpsolve/errors.hpp"
#include "mpsolve/functional.hpp"
#include "mpsolve/transform.hpp"
#include "oracles.hpp"

using namespace mps;

namespace {

Grid unit_square(int n) {
    const std::vector<double> ext{1.0, 1.0};
    const std::vector<int> nodes{n, n};
    return Grid(2, ext, nodes);
}

}  // namespace

TEST_CASE("pointwise anchors of the change of variable") {
    const Grid g = unit_square(4);
    ScalarField u(g);
    const ScalarField v0 = v_from_u(u, 1.0, 1.0);
    for (std::size_t i = 0; i < v0.size(); ++i) CHECK(v0[i] == 0.0);
    const ScalarField u0 = u_from_v(ScalarField(g), 1.0, 1.0);
    for (std::size_t i = 0; i < u0.size(); ++i) CHECK(u0[i] == 0.0);

    ScalarField ln2(g, std::log(2.0));
    const ScalarField v1 = v_from_u(ln2, 1.0, 1.0);
    for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == doctest::Approx(1.0).epsilon(1e-15));

    ScalarField ve(g, std::exp(1.0) - 1.0);
    const ScalarField u1 = u_from_v(ve, 1.0, 1.0);
    for (std::size_t i = 0; i < u1.size(); ++i) CHECK(u1[i] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("roundtrip is the identity within 1e-13 on the nonnegative cone") {
    // the correspondence is a monotone bijection on [0, infinity); that is
    // the range the pipeline feeds it (solutions are nonnegative)
    const Grid g = unit_square(9);
    std::mt19937_64 rng(77);
    for (double mu : {0.3, 1.0, 5.0}) {
        for (double lam : {1.0, 2.0, 1e4}) {
            ScalarField u = oracle::random_field(g, rng, 2.0);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::abs(u[i]);
            const ScalarField back = u_from_v(v_from_u(u, mu, lam), mu, lam);
            for (std::size_t i = 0; i < u.size(); ++i)
                CHECK(std::abs(back[i] - u[i]) < 1e-13 * (1.0 + std::abs(u[i])));
        }
    }
    // mildly negative values with moderate mu*lambda also roundtrip
    const double mu = 0.8, lam = 3.0;
    ScalarField u = oracle::random_field(g, rng, 0.5);
    const ScalarField back = u_from_v(v_from_u(u, mu, lam), mu, lam);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(std::abs(back[i] - u[i]) < 1e-12 * (1.0 + std::abs(u[i])));
}

TEST_CASE("domain guards") {
    const Grid g = unit_square(4);
    ScalarField huge(g, 800.0);
    CHECK_THROWS_AS(v_from_u(huge, 1.0, 1.0), Error);  // mu*u > 700 overflows

    ScalarField vbad(g);
    vbad[0] = -1.5;  // 1 + lambda*v <= 0 at lambda = 1
    CHECK_THROWS_AS(u_from_v(vbad, 1.0, 1.0), Error);
    CHECK_THROWS_AS(v_from_u(huge, -1.0, 1.0), ConfigError);
}

TEST_CASE("monotonicity transfers through the map") {
    const Grid g = unit_square(7);
    std::mt19937_64 rng(13);
    const ScalarField u1 = oracle::random_field(g, rng, 1.5);
    ScalarField u2 = u1;
    for (std::size_t i = 0; i < u2.size(); ++i) u2[i] += 0.25 + 0.1 * std::abs(u1[i]);
    const ScalarField v1 = v_from_u(u1, 0.8, 3.0);
    const ScalarField v2 = v_from_u(u2, 0.8, 3.0);
    for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] <= v2[i]);
}

TEST_CASE("discrete gradient identity grad u = (lambda/mu) grad v / (1 + lambda v)") {
    // for smooth manufactured fields the chain-rule identity holds to O(h^2)
    const oracle::Manufactured mf;
    const double lambda = 3.0;
    auto max_defect = [&](int n) {
        const Grid g = unit_square(n);
        const ScalarField u =
            oracle::sample(g, [&](double x, double y, double z) { return mf.u(x, y, z, 2); });
        const ScalarField v = v_from_u(u, mf.mu, lambda);
        const ScalarField gu = grad_squared(u);
        const ScalarField gv = grad_squared(v);
        double worst = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double scale = lambda / (mf.mu * (1.0 + lambda * v[i]));
            // compare |grad u|^2 with (lambda/mu)^2 |grad v|^2 / (1+lambda v)^2
            worst = std::max(worst, std::abs(gu[i] - scale * scale * gv[i]));
        }
        return worst;
    };
    const double d1 = max_defect(33);
    const double d2 = max_defect(65);
    CHECK(d2 < d1);
    CHECK(std::log2(d1 / d2) >= 1.5);  // nodewise max still contracts at ~2nd order
}

TEST_CASE("verify_pair: degenerate zero solution and manufactured pair") {
    const Grid g = unit_square(17);
    ScalarField zero_c(g), zero_f(g);
    const ProblemSpec trivial(g, zero_c, zero_f, 1.0, 10.0);
    const TransformPair zero_pair = verify_pair(trivial, 2.0, ScalarField(g));
    CHECK(zero_pair.residual_p == 0.0);
    CHECK(zero_pair.residual_q == 0.0);
    CHECK(zero_pair.roundtrip_error == 0.0);
    CHECK(zero_pair.positivity_margin == 0.0);
    CHECK(!zero_pair.success);  // degenerate: no strict positivity

    // clamping tolerance
    ScalarField small_neg(g, 1.0);
    small_neg[0] = -5e-7;
    const TransformPair clamped = verify_pair(trivial, 2.0, small_neg);
    CHECK(clamped.v[0] == 0.0);
    ScalarField too_neg(g, 1.0);
    too_neg[0] = -1e-3;
    CHECK_THROWS_AS(verify_pair(trivial, 2.0, too_neg), Error);

    // manufactured solution: u > 0 inside, f from the quasilinear equation;
    // the transformed v has an O(h^2) residual and the pair certifies
    const oracle::Manufactured mf;
    const double lambda = 3.0;
    auto pair_at = [&](int n) {
        const Grid gr = unit_square(n);
        const ScalarField c =
            oracle::sample(gr, [&](double x, double y, double z) { return mf.c(x, y, z); });
        const ScalarField f =
            oracle::sample(gr, [&](double x, double y, double z) { return mf.f(x, y, z, 2); });
        const ProblemSpec spec(gr, c, f, mf.mu, 10.0);
        const ScalarField u =
            oracle::sample(gr, [&](double x, double y, double z) { return mf.u(x, y, z, 2); });
        return verify_pair(spec, lambda, v_from_u(u, mf.mu, lambda), /*tol_p=*/1.0);
    };
    const TransformPair p1 = pair_at(33);
    const TransformPair p2 = pair_at(65);
    const TransformPair p3 = pair_at(129);
    CHECK(p1.positivity_margin > 0.0);
    CHECK(p1.roundtrip_error < 1e-12);
    CHECK(std::log2(p1.residual_q / p2.residual_q) >= 1.9);
    CHECK(std::log2(p2.residual_q / p3.residual_q) >= 1.9);
    CHECK(std::log2(p1.residual_p / p2.residual_p) >= 1.9);
    CHECK(std::log2(p2.residual_p / p3.residual_p) >= 1.9);

    // residual transfer: v carries an O(h^2) defect and u inherits a
    // comparable one (report the transfer factor, just bound it loosely)
    CHECK(p2.residual_p < 50.0 * p2.residual_q + 1e-9);
}
