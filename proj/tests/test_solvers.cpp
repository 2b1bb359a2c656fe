#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpsolve/errors.hpp"
#include "mpsolve/nonlinearity.hpp"
#include "mpsolve/solvers.hpp"
#include "oracles.hpp"

using namespace mps;

namespace {

Grid unit_square(int n) {
    const std::vector<double> ext{1.0, 1.0};
    const std::vector<int> nodes{n, n};
    return Grid(2, ext, nodes);
}

double mollifier(double x, double y, double cx, double cy, double r) {
    const double rho2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (r * r);
    return rho2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rho2)) : 0.0;
}

// miniature sign-changing scenario with lambda_1(-c) > 0 and mu < gamma_1
ProblemSpec sign_changing_problem(const Grid& g, double amp = 60.0) {
    ScalarField c = oracle::sample(g, [&](double x, double y, double) {
        return amp * (mollifier(x, y, 0.3, 0.5, 0.22) - mollifier(x, y, 0.7, 0.5, 0.22));
    });
    ScalarField f = oracle::sample(
        g, [](double x, double y, double) { return 0.5 * mollifier(x, y, 0.5, 0.5, 0.3); });
    ScalarField minus_c = c;
    scale(minus_c, -1.0);
    REQUIRE(principal_eigenvalue(minus_c).value > 0.0);
    const double gamma1 = weighted_eigenvalue(c, f).value;
    return ProblemSpec(g, c, f, 0.5 * gamma1, 10.0);
}

ProblemSpec bump_f_problem(const Grid& g, double c_const) {
    ScalarField c(g, c_const);
    ScalarField f = oracle::sample(
        g, [](double x, double y, double) { return 0.5 * mollifier(x, y, 0.5, 0.5, 0.3); });
    const double gamma1 = weighted_eigenvalue(c, f).value;
    return ProblemSpec(g, c, f, 0.5 * gamma1, 10.0);
}

}  // namespace

TEST_CASE("solve_poisson matches a dense solve") {
    const Grid g = unit_square(6);
    std::mt19937_64 rng(3);
    const ScalarField rhs = oracle::random_field(g, rng);
    const ScalarField x = solve_poisson(rhs, 1e-12);
    Eigen::MatrixXd A = oracle::dense_neg_laplacian(g);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rhs.size()));
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rhs[static_cast<std::size_t>(i)];
    const Eigen::VectorXd ref = A.ldlt().solve(b);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(x[i] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-9));
}

TEST_CASE("newton_refine: manufactured discrete critical point") {
    const Grid g = unit_square(17);
    const double lambda = 8.0, mu = 0.9;
    // choose v* >= 0 and define f so that v* is an exact critical point:
    // f = (A v* - c v* - c g(v*)) / (mu (v* + 1/lambda))
    const ScalarField vstar = oracle::sample(g, [](double x, double y, double) {
        return 0.8 * std::sin(M_PI * x) * std::sin(M_PI * y);
    });
    const ScalarField c = oracle::sample(g, [](double x, double y, double) {
        return 3.0 * std::cos(M_PI * x) * std::cos(M_PI * y);
    });
    const ScalarField av = apply_neg_laplacian(vstar);
    ScalarField f(g);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = (av[i] - c[i] * vstar[i] - c[i] * kernels::g(lambda, vstar[i])) /
               (mu * (vstar[i] + 1.0 / lambda));
    const ProblemSpec spec(g, c, f, mu, 10.0);
    REQUIRE(norm_l2(gradient(spec, lambda, vstar)) < 1e-11);

    // starting at the critical point: nothing moves
    SolveOptions opts;
    const CriticalPoint fixed = newton_refine(spec, lambda, vstar, opts);
    CHECK(fixed.converged);
    CHECK(fixed.iterations <= 1);
    ScalarField moved = fixed.v;
    add_scaled(moved, -1.0, vstar);
    CHECK(norm_h10(moved) < 1e-10);

    // perturbed start inside the gate: convergence back to v*
    std::mt19937_64 rng(5);
    ScalarField v = vstar;
    ScalarField noise = oracle::random_field(g, rng, 1.0);
    scale(noise, 1e-4 / norm_inf(noise));
    add_scaled(v, 1.0, noise);
    REQUIRE(norm_l2(gradient(spec, lambda, v)) < opts.newton_gate);
    const CriticalPoint refined = newton_refine(spec, lambda, v, opts);
    CHECK(refined.converged);
    CHECK(refined.grad_norm <= opts.tol_newton);
    ScalarField err = refined.v;
    add_scaled(err, -1.0, vstar);
    CHECK(norm_h10(err) < 1e-8);

    // the gate rejects far starts
    ScalarField far(g, 5.0);
    CHECK_THROWS_AS(newton_refine(spec, lambda, far, opts), ConfigError);
}

TEST_CASE("select_lambda: admissibility checks and regime guard") {
    const Grid g = unit_square(17);
    const ProblemSpec spec = bump_f_problem(g, 0.0);
    SolveOptions opts;

    SolveOptions bad_theta = opts;
    bad_theta.theta = 1.5;
    CHECK_THROWS_AS(select_lambda(spec, bad_theta), ConfigError);
    SolveOptions bad_p = opts;
    bad_p.p = 0.5;
    CHECK_THROWS_AS(select_lambda(spec, bad_p), ConfigError);

    // violated regime: mu far beyond gamma_1
    ScalarField f = spec.f;
    const ProblemSpec bad(g, spec.c, f, 100.0 * spec.mu, 10.0);
    CHECK_THROWS_AS(select_lambda(bad, opts), RegimeError);
}

TEST_CASE("select_lambda: c <= 0 with f == 0 passes at lambda_start") {
    const Grid g = unit_square(17);
    ScalarField c(g, -1.0), f(g);
    const ProblemSpec spec(g, c, f, 1.0, 10.0);
    SolveOptions opts;
    opts.sphere_probes = 16;
    const GeometryParams geom = select_lambda(spec, opts);
    CHECK(geom.lambda == opts.lambda_start);
    CHECK(geom.radius == std::pow(geom.lambda, -geom.theta));
    CHECK(geom.sphere_min > 0.0);
}

TEST_CASE("select_lambda is deterministic and terminates on the bump scenario") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = sign_changing_problem(g);
    SolveOptions opts;
    opts.sphere_probes = 32;
    const GeometryParams a = select_lambda(spec, opts);
    const GeometryParams b = select_lambda(spec, opts);
    CHECK(a.lambda == b.lambda);
    CHECK(a.sphere_min == b.sphere_min);  // bitwise determinism
    CHECK(a.radius == std::pow(a.lambda, -opts.theta));
    CHECK(a.sphere_min > 0.0);
}

TEST_CASE("minimize_in_ball: bump source gives a positive interior minimizer") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = bump_f_problem(g, 0.0);  // c == 0, mu < gamma_1
    SolveOptions opts;
    opts.sphere_probes = 16;
    const GeometryParams geom = select_lambda(spec, opts);
    const CriticalPoint v1 = minimize_in_ball(spec, geom, opts);
    CHECK(v1.converged);
    CHECK(v1.energy < 0.0);
    CHECK(v1.grad_norm <= opts.tol_newton);
    CHECK(norm_h10(v1.v) < geom.radius);
    double vmin = 1e300;
    for (double x : v1.v.values()) vmin = std::min(vmin, x);
    CHECK(vmin > 0.0);  // strictly positive inside
}

TEST_CASE("minimize_in_ball: f == 0 degenerates to the origin") {
    const Grid g = unit_square(17);
    ScalarField c(g, -0.5), f(g);
    const ProblemSpec spec(g, c, f, 1.0, 10.0);
    SolveOptions opts;
    opts.sphere_probes = 8;
    const GeometryParams geom = select_lambda(spec, opts);
    const CriticalPoint v1 = minimize_in_ball(spec, geom, opts);
    CHECK(v1.energy == 0.0);
    CHECK(norm_h10(v1.v) == 0.0);
    CHECK(v1.grad_norm == 0.0);
}

TEST_CASE("construct_v0: needs c+ != 0, lands outside the ball with negative energy") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = sign_changing_problem(g);
    SolveOptions opts;
    opts.sphere_probes = 16;
    const GeometryParams geom = select_lambda(spec, opts);
    const ScalarField v0 = construct_v0(spec, geom, opts);
    CHECK(energy(spec, geom.lambda, v0).total < 0.0);
    CHECK(norm_h10(v0) > geom.radius);
    // supported in {c > 0}
    for (std::size_t i = 0; i < v0.size(); ++i)
        if (v0[i] != 0.0) CHECK(spec.c[i] > 0.0);

    const ProblemSpec coercive = bump_f_problem(g, -1.0);
    CHECK_THROWS_AS(construct_v0(coercive, geom, opts), RegimeError);
}

TEST_CASE("mountain pass finds a second critical point above the sphere level") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = sign_changing_problem(g);
    SolveOptions opts;
    opts.sphere_probes = 32;
    const GeometryParams geom = select_lambda(spec, opts);
    const CriticalPoint v1 = minimize_in_ball(spec, geom, opts);
    const ScalarField v0 = construct_v0(spec, geom, opts);

    // the initial path already straddles the sphere: max >= M > 0 >= endpoints
    {
        const int m = opts.path_nodes;
        double path_max = -1e300;
        for (int k = 0; k < m; ++k) {
            ScalarField node = v0;
            scale(node, static_cast<double>(k) / static_cast<double>(m - 1));
            path_max = std::max(path_max, energy(spec, geom.lambda, node).total);
        }
        CHECK(path_max >= geom.sphere_min);
        CHECK(energy(spec, geom.lambda, v0).total < 0.0);
    }

    PathTrace trace;
    const CriticalPoint w1 = mountain_pass(spec, geom, v0, opts, &trace);
    CHECK(w1.converged);
    CHECK(w1.grad_norm <= opts.tol_newton);
    CHECK(w1.level == w1.energy);
    CHECK(w1.level >= geom.sphere_min);
    CHECK(w1.level > 0.0);
    CHECK(v1.energy < 0.0);

    ScalarField diff = w1.v;
    add_scaled(diff, -1.0, v1.v);
    CHECK(norm_h10(diff) > 1e-3 * std::max(norm_h10(w1.v), norm_h10(v1.v)));

    CHECK(trace.energy.size() == static_cast<std::size_t>(opts.path_nodes));
    CHECK(trace.arclength.front() == 0.0);
    CHECK(trace.arclength.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_two end-to-end on the miniature scenario, deterministic") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = sign_changing_problem(g);
    SolveOptions opts;
    opts.sphere_probes = 32;

    const SolveOutcome a = solve_two(spec, opts);
    CHECK(a.two_solution_mode);
    CHECK(a.minimizer.energy < 0.0);
    REQUIRE(a.pass.has_value());
    CHECK(a.pass->level >= a.geometry.sphere_min);
    CHECK(a.pair1.success);
    CHECK(a.pair2->success);
    CHECK(a.pair1.positivity_margin > 0.0);
    CHECK(a.pair2->positivity_margin > 0.0);
    CHECK(a.distinctness >= a.distinctness_threshold);
    // critical points are nonnegative (clamp tolerance)
    double vmin = 1e300;
    for (double x : a.minimizer.v.values()) vmin = std::min(vmin, x);
    for (double x : a.pass->v.values()) vmin = std::min(vmin, x);
    CHECK(vmin >= -1e-6);

    const SolveOutcome b = solve_two(spec, opts);
    CHECK(a.geometry.lambda == b.geometry.lambda);
    CHECK(a.minimizer.energy == b.minimizer.energy);  // bitwise determinism
    CHECK(a.pass->energy == b.pass->energy);
    CHECK(a.distinctness == b.distinctness);
}

TEST_CASE("solve_two: uniqueness regime (c <= 0) returns a single certified solution") {
    const Grid g = unit_square(25);
    const ProblemSpec spec = bump_f_problem(g, -1.0);
    SolveOptions opts;
    const SolveOutcome out = solve_two(spec, opts);
    CHECK(!out.two_solution_mode);
    CHECK(!out.pass.has_value());
    CHECK(out.pair1.success);
    CHECK(out.minimizer.grad_norm <= opts.tol_newton);

    // repeated minimization from random starts lands on the same field
    std::mt19937_64 rng(123);
    for (int rep = 0; rep < 3; ++rep) {
        ScalarField start = oracle::random_field(g, rng, 0.3);
        const CriticalPoint again = minimize_unconstrained(spec, out.geometry.lambda, opts, &start);
        ScalarField diff = again.v;
        add_scaled(diff, -1.0, out.minimizer.v);
        CHECK(norm_h10(diff) < 1e-6);
    }
}

TEST_CASE("solve_two: spectral gate failures carry the necessary-condition message") {
    const Grid g = unit_square(17);
    // c >= 0 with mu = 2 gamma_1: gate must fail, message must cite necessity
    ScalarField c = oracle::sample(
        g, [](double x, double y, double) { return 5.0 * mollifier(x, y, 0.3, 0.5, 0.22); });
    ScalarField f = oracle::sample(
        g, [](double x, double y, double) { return 0.5 * mollifier(x, y, 0.5, 0.5, 0.3); });
    const double gamma1 = weighted_eigenvalue(c, f).value;
    const ProblemSpec bad(g, c, f, 2.0 * gamma1, 10.0);
    try {
        solve_two(bad, SolveOptions{});
        FAIL("expected RegimeError");
    } catch (const RegimeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("necessary") != std::string::npos);
        CHECK(msg.find("gamma_1") != std::string::npos);
    }

    // scale sanity: shrinking f keeps the gate satisfied
    const ProblemSpec good(g, c, f, 0.5 * gamma1, 10.0);
    ScalarField gate_pot(g);
    for (std::size_t i = 0; i < c.size(); ++i) gate_pot[i] = -c[i] - good.mu * f[i];
    const double full = principal_eigenvalue(gate_pot).value;
    REQUIRE(full > 0.0);
    for (double sigma : {0.75, 0.5, 0.25}) {
        ScalarField pot(g);
        for (std::size_t i = 0; i < c.size(); ++i) pot[i] = -c[i] - sigma * good.mu * f[i];
        CHECK(principal_eigenvalue(pot).value >= full - 1e-10);
    }
}

TEST_CASE("hypothesis violations are rejected up front") {
    const Grid g = unit_square(9);
    ScalarField c(g), f(g);
    f[0] = -0.5;
    const ProblemSpec bad_f(g, c, f, 1.0, 10.0);
    CHECK_THROWS_AS(solve_two(bad_f, SolveOptions{}), ConfigError);

    const ProblemSpec no_f(g, c, ScalarField(g), 1.0, 10.0);
    CHECK_THROWS_AS(solve_two(no_f, SolveOptions{}), ConfigError);
}
