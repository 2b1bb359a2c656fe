#include "mpsolve/functional.hpp"

#include <cmath>
#include <string>

#include "mpsolve/errors.hpp"
#include "mpsolve/nonlinearity.hpp"

namespace mps {

ProblemSpec::ProblemSpec(const Grid& grid_, ScalarField c_, ScalarField f_, double mu_, double q_)
    : grid(grid_), c(std::move(c_)), f(std::move(f_)), mu(mu_), q(q_) {
    if (!(c.grid() == grid) || !(f.grid() == grid))
        throw ConfigError("coefficient fields do not live on the problem grid");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(q > static_cast<double>(grid.dimension()) / 2.0))
        throw ConfigError("exponent q must exceed N/2 = " + std::to_string(grid.dimension() / 2.0));
    check_finite(c, "coefficient c");
    check_finite(f, "coefficient f");
}

bool ProblemSpec::f_nonnegative() const {
    for (double v : f.values())
        if (v < 0.0) return false;
    return true;
}

bool ProblemSpec::f_nontrivial() const {
    for (double v : f.values())
        if (v > 0.0) return true;
    return false;
}

bool ProblemSpec::c_positive_part_nontrivial() const {
    for (double v : c.values())
        if (v > 0.0) return true;
    return false;
}

void ProblemSpec::check_hypothesis() const {
    if (!f_nonnegative()) throw ConfigError("hypothesis violated: f must be nonnegative nodewise");
    if (!f_nontrivial())
        throw ConfigError("hypothesis violated: f must be positive somewhere (f not identically 0)");
}

namespace {

void require_grid(const ProblemSpec& spec, const ScalarField& v) {
    if (!(v.grid() == spec.grid)) throw ConfigError("field does not live on the problem grid");
}

}  // namespace

EnergyBreakdown energy(const ProblemSpec& spec, double lambda, const ScalarField& v) {
    require_grid(spec, v);
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");

    const double w = spec.grid.cell_volume();
    const auto cv = spec.c.values();
    const auto fv = spec.f.values();
    const auto vv = v.values();

    double weighted_sq = 0.0;  // int (c + mu f) (v+)^2
    double super = 0.0;        // int c G_lambda(v+)
    double lin = 0.0;          // int f v
    for (std::size_t i = 0; i < vv.size(); ++i) {
        const double vp = vv[i] > 0.0 ? vv[i] : 0.0;
        weighted_sq += (cv[i] + spec.mu * fv[i]) * vp * vp;
        super += cv[i] * kernels::G(lambda, vp);
        lin += fv[i] * vv[i];
    }

    EnergyBreakdown out;
    out.quadratic = 0.5 * (inner_h10(v, v) - w * weighted_sq);
    out.superquadratic = -w * super;
    out.linear = -(spec.mu / lambda) * w * lin;
    out.total = out.quadratic + out.superquadratic + out.linear;
    return out;
}

ScalarField gradient(const ProblemSpec& spec, double lambda, const ScalarField& v) {
    require_grid(spec, v);
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");

    ScalarField r = apply_neg_laplacian(v);
    const auto cv = spec.c.values();
    const auto fv = spec.f.values();
    const auto vv = v.values();
    const double mu_over_lambda = spec.mu / lambda;
    for (std::size_t i = 0; i < vv.size(); ++i) {
        const double vp = vv[i] > 0.0 ? vv[i] : 0.0;
        r[i] -= (cv[i] + spec.mu * fv[i]) * vp + cv[i] * kernels::g(lambda, vp) + mu_over_lambda * fv[i];
    }
    check_finite(r, "gradient");
    return r;
}

ScalarField grad_component(const ScalarField& u, int axis) {
    const Grid& g = u.grid();
    if (axis < 0 || axis >= g.dimension()) throw ConfigError("grad_component: axis out of range");
    ScalarField out(g);
    const auto uv = u.values();

    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    const std::size_t s[3] = {1, static_cast<std::size_t>(m0),
                              static_cast<std::size_t>(m0) * static_cast<std::size_t>(m1)};
    const int m[3] = {m0, m1, m2};
    const double h = g.spacing(axis);
    const std::size_t sd = s[axis];
    const int md = m[axis];

    std::size_t idx = 0;
    for (int k = 0; k < m2; ++k) {
        for (int j = 0; j < m1; ++j) {
            for (int i = 0; i < m0; ++i, ++idx) {
                const int pos[3] = {i, j, k};
                const int p = pos[axis];
                double du;
                if (p > 0 && p + 1 < md) {
                    du = (uv[idx + sd] - uv[idx - sd]) / (2.0 * h);
                } else if (md < 3) {
                    // too few interior nodes for one-sided stencils;
                    // centered difference through the zero boundary
                    const double up = p + 1 < md ? uv[idx + sd] : 0.0;
                    const double um = p > 0 ? uv[idx - sd] : 0.0;
                    du = (up - um) / (2.0 * h);
                } else if (p == 0) {
                    du = (-3.0 * uv[idx] + 4.0 * uv[idx + sd] - uv[idx + 2 * sd]) / (2.0 * h);
                } else {
                    du = (3.0 * uv[idx] - 4.0 * uv[idx - sd] + uv[idx - 2 * sd]) / (2.0 * h);
                }
                out[idx] = du;
            }
        }
    }
    return out;
}

ScalarField grad_squared(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    for (int d = 0; d < g.dimension(); ++d) {
        const ScalarField comp = grad_component(u, d);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += comp[i] * comp[i];
    }
    return out;
}

double residual_P(const ProblemSpec& spec, const ScalarField& u) {
    require_grid(spec, u);
    check_finite(u, "residual_P input");
    ScalarField r = apply_neg_laplacian(u);
    const ScalarField gsq = grad_squared(u);
    const auto cv = spec.c.values();
    const auto fv = spec.f.values();
    const auto uv = u.values();
    for (std::size_t i = 0; i < uv.size(); ++i)
        r[i] -= cv[i] * uv[i] + spec.mu * gsq[i] + fv[i];
    return norm_l2(r);
}

double residual_Q(const ProblemSpec& spec, double lambda, const ScalarField& v) {
    require_grid(spec, v);
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    ScalarField r = apply_neg_laplacian(v);
    const auto cv = spec.c.values();
    const auto fv = spec.f.values();
    const auto vv = v.values();
    for (std::size_t i = 0; i < vv.size(); ++i) {
        const double one_plus = 1.0 + lambda * vv[i];
        if (!(one_plus > 0.0))
            throw Error("numerics", "residual_Q: 1 + lambda*v must stay positive nodewise");
        r[i] -= (cv[i] * one_plus * std::log1p(lambda * vv[i]) + spec.mu * fv[i] * one_plus) / lambda;
    }
    return norm_l2(r);
}

}  // namespace mps
