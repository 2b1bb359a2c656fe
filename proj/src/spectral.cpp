#include "mpsolve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpsolve/errors.hpp"
#include "mpsolve/linalg.hpp"

namespace mps {

namespace {

constexpr double kDegenerateFloor = 1e-14;

// Row-wise Gershgorin lower bound of -Delta + diag(V) on the masked set.
double gershgorin_lower(const Grid& g, std::span<const double> V,
                        const std::vector<std::uint8_t>* mask) {
    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    const double ih[3] = {1.0 / (g.spacing(0) * g.spacing(0)), 1.0 / (g.spacing(1) * g.spacing(1)),
                          g.dimension() == 3 ? 1.0 / (g.spacing(2) * g.spacing(2)) : 0.0};
    const double diag_lap = 2.0 * (ih[0] + ih[1] + ih[2]);
    const std::size_t s1 = static_cast<std::size_t>(m0);
    const std::size_t s2 = s1 * static_cast<std::size_t>(m1);

    double lower = std::numeric_limits<double>::infinity();
    std::size_t idx = 0;
    for (int k = 0; k < m2; ++k)
        for (int j = 0; j < m1; ++j)
            for (int i = 0; i < m0; ++i, ++idx) {
                if (mask && !(*mask)[idx]) continue;
                auto in_set = [&](std::size_t nb) { return !mask || (*mask)[nb]; };
                double radius = 0.0;
                if (i > 0 && in_set(idx - 1)) radius += ih[0];
                if (i + 1 < m0 && in_set(idx + 1)) radius += ih[0];
                if (j > 0 && in_set(idx - s1)) radius += ih[1];
                if (j + 1 < m1 && in_set(idx + s1)) radius += ih[1];
                if (g.dimension() == 3) {
                    if (k > 0 && in_set(idx - s2)) radius += ih[2];
                    if (k + 1 < m2 && in_set(idx + s2)) radius += ih[2];
                }
                lower = std::min(lower, diag_lap + V[idx] - radius);
            }
    return lower;
}

// (-Delta + diag(V) - sigma) restricted to the mask; input and output are
// zero off the mask.
struct ShiftedOp {
    const Grid& grid;
    std::span<const double> V;
    const std::vector<std::uint8_t>* mask;
    double sigma;

    void operator()(std::span<const double> in, std::span<double> out) const {
        apply_neg_laplacian(grid, in, out);
        for (std::size_t i = 0; i < in.size(); ++i) {
            out[i] += (V[i] - sigma) * in[i];
            if (mask && !(*mask)[i]) out[i] = 0.0;
        }
    }
};

double masked_count(const std::vector<std::uint8_t>& mask) {
    std::size_t n = 0;
    for (auto m : mask)
        if (m) ++n;
    return static_cast<double>(n);
}

EigenResult principal_impl(const ScalarField& V, const std::vector<std::uint8_t>* mask,
                           const EigenOptions& opts) {
    const Grid& g = V.grid();
    check_finite(V, "potential V");
    const std::size_t n = g.interior_size();
    const double w = g.cell_volume();
    const double sqw = std::sqrt(w);

    const double lower = gershgorin_lower(g, V.values(), mask);
    const double sigma = lower - 1e-3 * (1.0 + std::abs(lower));
    const ShiftedOp shifted{g, V.values(), mask, sigma};
    LinearOp op = [&shifted](std::span<const double> in, std::span<double> out) { shifted(in, out); };

    // deterministic start: all ones on the active set, unit L2 norm
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (!mask || (*mask)[i]) x[i] = 1.0;
    {
        const double nrm = sqw * norm2(x);
        for (auto& xi : x) xi /= nrm;
    }

    std::vector<double> y(n), ly(n);
    const int cg_max = static_cast<int>(20 * n + 200);
    double value = 0.0;
    double res_scaled = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const double cg_tol = std::clamp(0.01 * res_scaled, 1e-13, 1e-4);
        KrylovResult kr = conjugate_gradient(op, x, y, cg_tol, cg_max);
        if (!kr.converged && !(kr.residual <= 10.0 * cg_tol * norm2(x)))
            throw ConvergenceError("spectral", "inner CG solve failed in eigen iteration", kr.residual);

        double nrm = sqw * norm2(y);
        if (!(nrm > 0.0)) throw ConvergenceError("spectral", "eigen iterate collapsed to zero", 0.0);
        for (auto& yi : y) yi /= nrm;

        // Rayleigh quotient and residual of the unshifted operator
        apply_neg_laplacian(g, y, ly);
        for (std::size_t i = 0; i < n; ++i) {
            ly[i] += V[i] * y[i];
            if (mask && !(*mask)[i]) ly[i] = 0.0;
        }
        value = w * dot(ly, y);  // ||y||_2 = 1 in quadrature norm
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ly[i] - value * y[i];
            res += d * d;
        }
        res = sqw * std::sqrt(res);
        res_scaled = res / (1.0 + std::abs(value));
        x = y;
        if (res_scaled <= opts.tol) {
            EigenResult out;
            out.value = value;
            // sign-fix: principal mode nonnegative
            double s = 0.0;
            for (double yi : y) s += yi;
            if (s < 0.0)
                for (auto& yi : y) yi = -yi;
            out.eigenfunction = ScalarField(g, std::move(y));
            out.iterations = it + 1;
            out.residual = res;
            return out;
        }
    }
    throw ConvergenceError("spectral",
                           "eigenvalue iteration did not reach tolerance " + std::to_string(opts.tol) +
                               " in " + std::to_string(opts.max_iter) + " iterations",
                           res_scaled);
}

}  // namespace

EigenResult principal_eigenvalue(const ScalarField& V, const EigenOptions& opts) {
    return principal_impl(V, nullptr, opts);
}

EigenResult principal_eigenvalue_masked(const ScalarField& V, const std::vector<std::uint8_t>& mask,
                                        const EigenOptions& opts) {
    if (mask.size() != V.size()) throw ConfigError("mask length does not match grid");
    if (masked_count(mask) == 0.0) throw ConfigError("mask has no active nodes");
    return principal_impl(V, &mask, opts);
}

EigenResult weighted_eigenvalue(const ScalarField& c, const ScalarField& f, const EigenOptions& opts) {
    const Grid& g = c.grid();
    if (!(f.grid() == g)) throw ConfigError("weighted_eigenvalue: c and f on different grids");
    for (double fi : f.values())
        if (fi < 0.0) throw ConfigError("weighted_eigenvalue: f must be nonnegative");
    bool f_nontrivial = false;
    for (double fi : f.values())
        if (fi > 0.0) f_nontrivial = true;
    if (!f_nontrivial) throw ConfigError("weighted_eigenvalue: f is identically zero");

    // gamma_1 is defined only when the unweighted form is positive
    ScalarField minus_c(g);
    for (std::size_t i = 0; i < c.size(); ++i) minus_c[i] = -c[i];
    EigenResult gate = principal_eigenvalue(minus_c, opts);
    if (!(gate.value > 0.0))
        throw RegimeError("spectral",
                          "weighted eigenvalue undefined: lambda_1(-c) = " + std::to_string(gate.value) +
                              " <= 0");

    const std::size_t n = g.interior_size();
    const double w = g.cell_volume();
    const double sqw = std::sqrt(w);
    const ShiftedOp left{g, minus_c.values(), nullptr, 0.0};  // A + diag(-c), SPD by the gate
    LinearOp op = [&left](std::span<const double> in, std::span<double> out) { left(in, out); };

    std::vector<double> x(n, 1.0);
    {
        const double nrm = sqw * norm2(x);
        for (auto& xi : x) xi /= nrm;
    }
    std::vector<double> z(n), y(n), ly(n);
    const auto fv = f.values();
    const int cg_max = static_cast<int>(20 * n + 200);

    double value = 0.0;
    double res_scaled = std::numeric_limits<double>::infinity();
    bool ever_nondegenerate = false;
    for (int it = 0; it < opts.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) z[i] = fv[i] * x[i];
        const double znorm = sqw * norm2(z);
        if (!(znorm > 0.0)) {
            if (!ever_nondegenerate)
                throw RegimeError("spectral", "weighted eigenvalue: f-weight degenerates for every iterate");
            throw ConvergenceError("spectral", "weighted eigenvalue: weight collapsed mid-iteration",
                                   res_scaled);
        }
        const double cg_tol = std::clamp(0.01 * res_scaled, 1e-13, 1e-4);
        KrylovResult kr = conjugate_gradient(op, z, y, cg_tol, cg_max);
        if (!kr.converged && !(kr.residual <= 10.0 * cg_tol * norm2(z)))
            throw ConvergenceError("spectral", "inner CG solve failed in pencil iteration", kr.residual);

        const double nrm = sqw * norm2(y);
        for (auto& yi : y) yi /= nrm;

        left(y, ly);  // (A - M_c) y
        const double quad_form = w * dot(ly, y);
        double weight_form = 0.0;
        for (std::size_t i = 0; i < n; ++i) weight_form += fv[i] * y[i] * y[i];
        weight_form *= w;
        if (weight_form > kDegenerateFloor) ever_nondegenerate = true;
        value = quad_form / std::max(weight_form, kDegenerateFloor);

        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = ly[i] - value * fv[i] * y[i];
            res += d * d;
        }
        res = sqw * std::sqrt(res);
        res_scaled = res / (1.0 + std::abs(value));
        x = y;
        if (res_scaled <= opts.tol && ever_nondegenerate) {
            EigenResult out;
            out.value = value;
            double s = 0.0;
            for (double yi : y) s += yi;
            if (s < 0.0)
                for (auto& yi : y) yi = -yi;
            out.eigenfunction = ScalarField(g, std::move(y));
            out.iterations = it + 1;
            out.residual = res;
            return out;
        }
    }
    throw ConvergenceError("spectral", "weighted eigenvalue iteration did not converge", res_scaled);
}

double coercivity_constant(const ScalarField& V, bool assume_gate_checked, const EigenOptions& opts) {
    const Grid& g = V.grid();
    // V >= 0 nodewise: the form adds a nonnegative diagonal, kappa >= 1 and
    // the clamp is active (the pencil's top is clustered there, so the
    // iteration below would stall on a question whose answer is forced).
    bool v_nonneg = true;
    for (double vi : V.values())
        if (vi < 0.0) {
            v_nonneg = false;
            break;
        }
    if (v_nonneg) return 1.0;

    if (!assume_gate_checked) {
        EigenResult gate = principal_eigenvalue(V, opts);
        if (!(gate.value > 0.0))
            throw RegimeError("spectral", "coercivity constant requires lambda_1(V) > 0, got " +
                                              std::to_string(gate.value));
    }

    const std::size_t n = g.interior_size();
    const double w = g.cell_volume();
    const double sqw = std::sqrt(w);
    const ShiftedOp b_op{g, V.values(), nullptr, 0.0};  // B = A + M_V, SPD by the gate
    LinearOp op = [&b_op](std::span<const double> in, std::span<double> out) { b_op(in, out); };

    // power iteration on B^{-1} A: converges to the largest nu of A x = nu B x,
    // i.e. the smallest kappa = 1/nu of B x = kappa A x
    std::vector<double> x(n, 1.0);
    {
        const double nrm = sqw * norm2(x);
        for (auto& xi : x) xi /= nrm;
    }
    std::vector<double> ax(n), y(n), by(n), ay(n);
    const int cg_max = static_cast<int>(20 * n + 200);
    double kappa = 1.0;
    double res_scaled = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iter; ++it) {
        apply_neg_laplacian(g, x, ax);
        const double cg_tol = std::clamp(0.01 * res_scaled, 1e-13, 1e-4);
        KrylovResult kr = conjugate_gradient(op, ax, y, cg_tol, cg_max);
        if (!kr.converged && !(kr.residual <= 10.0 * cg_tol * norm2(ax)))
            throw ConvergenceError("spectral", "inner CG solve failed in coercivity iteration", kr.residual);
        const double nrm = sqw * norm2(y);
        for (auto& yi : y) yi /= nrm;

        b_op(y, by);
        apply_neg_laplacian(g, y, ay);
        kappa = dot(by, y) / dot(ay, y);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = by[i] - kappa * ay[i];
            res += d * d;
        }
        res = std::sqrt(res) / std::max(norm2(by), 1e-300);
        res_scaled = res;
        x = y;
        if (res_scaled <= opts.tol) {
            if (!(kappa > 0.0))
                throw RegimeError("spectral", "coercivity pencil returned non-positive kappa");
            return std::min(1.0, kappa);
        }
    }
    throw ConvergenceError("spectral", "coercivity pencil iteration did not converge", res_scaled);
}

double zero_set_eigenvalue(const ScalarField& c, const ScalarField& f, double mu,
                           const EigenOptions& opts) {
    const Grid& g = c.grid();
    if (!(f.grid() == g)) throw ConfigError("zero_set_eigenvalue: c and f on different grids");
    const double c_tol = 1e-12 * norm_inf(c);
    std::vector<std::uint8_t> mask(c.size(), 0);
    std::size_t active = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (std::abs(c[i]) <= c_tol) {
            mask[i] = 1;
            ++active;
        }
    if (active == 0) return std::numeric_limits<double>::infinity();

    ScalarField V(g);
    for (std::size_t i = 0; i < f.size(); ++i) V[i] = -mu * f[i];
    return principal_eigenvalue_masked(V, mask, opts).value;
}

}  // namespace mps
