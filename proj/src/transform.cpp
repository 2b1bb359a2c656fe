#include "mpsolve/transform.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mpsolve/errors.hpp"

namespace mps {

ScalarField v_from_u(const ScalarField& u, double mu, double lambda) {
    if (!(mu > 0.0) || !(lambda > 0.0)) throw ConfigError("transform requires mu > 0 and lambda > 0");
    ScalarField v(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double e = mu * u[i];
        if (e > 700.0)
            throw Error("transform", "v_from_u overflow: mu*u = " + std::to_string(e) + " at a node");
        v[i] = std::expm1(e) / lambda;
    }
    check_finite(v, "v_from_u");
    return v;
}

ScalarField u_from_v(const ScalarField& v, double mu, double lambda) {
    if (!(mu > 0.0) || !(lambda > 0.0)) throw ConfigError("transform requires mu > 0 and lambda > 0");
    ScalarField u(v.grid());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = lambda * v[i];
        if (!(1.0 + x > 0.0))
            throw Error("transform", "u_from_v domain violation: 1 + lambda*v <= 0 at a node");
        u[i] = std::log1p(x) / mu;
    }
    check_finite(u, "u_from_v");
    return u;
}

double interior_min_margin(const ScalarField& u) {
    const Grid& g = u.grid();
    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    const bool layer[3] = {m0 > 2, m1 > 2, g.dimension() == 3 ? m2 > 2 : false};
    const bool have_core = layer[0] && layer[1] && (g.dimension() == 2 || layer[2]);

    double margin = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (int k = 0; k < m2; ++k)
        for (int j = 0; j < m1; ++j)
            for (int i = 0; i < m0; ++i, ++idx) {
                if (have_core) {
                    if (i == 0 || i + 1 == m0 || j == 0 || j + 1 == m1) continue;
                    if (g.dimension() == 3 && (k == 0 || k + 1 == m2)) continue;
                }
                margin = std::min(margin, u[idx]);
            }
    return margin;
}

TransformPair verify_pair(const ProblemSpec& spec, double lambda, const ScalarField& v_solution,
                          double tol_p) {
    if (!(v_solution.grid() == spec.grid)) throw ConfigError("verify_pair: field on wrong grid");
    ScalarField v = v_solution;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0) {
            if (v[i] < -1e-6)
                throw Error("transform", "verify_pair: v has nodal value " + std::to_string(v[i]) +
                                             " below the -1e-6 clamp tolerance");
            v[i] = 0.0;
        }
    }

    TransformPair pair;
    pair.mu = spec.mu;
    pair.lambda = lambda;
    pair.v = v;
    pair.u = u_from_v(v, spec.mu, lambda);

    const ScalarField v_back = v_from_u(pair.u, spec.mu, lambda);
    const ScalarField u_back = u_from_v(v_back, spec.mu, lambda);
    double rt = 0.0;
    for (std::size_t i = 0; i < pair.u.size(); ++i)
        rt = std::max(rt, std::abs(pair.u[i] - u_back[i]));
    pair.roundtrip_error = rt;

    pair.residual_p = residual_P(spec, pair.u);
    pair.residual_q = residual_Q(spec, lambda, v);
    pair.positivity_margin = interior_min_margin(pair.u);
    pair.tol_p = tol_p;
    pair.success = pair.residual_p <= tol_p && pair.positivity_margin > 0.0;
    return pair;
}

}  // namespace mps
