#include "mpsolve/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mpsolve/errors.hpp"
#include "mpsolve/linalg.hpp"
#include "mpsolve/nonlinearity.hpp"

namespace mps {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}
    void tick(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        if (!current_.empty())
            sink_.push_back({current_, std::chrono::duration<double>(now - mark_).count()});
        current_ = name;
        mark_ = now;
    }
    void stop() { tick(""); }

private:
    std::vector<StageTiming>& sink_;
    std::string current_;
    std::chrono::steady_clock::time_point mark_;
};

ScalarField random_direction(const Grid& grid, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ScalarField d(grid);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = normal(rng);
    return d;
}

void rescale_h10(ScalarField& v, double target_norm) {
    const double nrm = norm_h10(v);
    if (!(nrm > 0.0)) throw Error("numerics", "cannot rescale a zero field");
    scale(v, target_norm / nrm);
}

// One backtracking step of sphere-constrained descent. Returns false when
// the line search cannot make progress.
bool sphere_descent_step(const ProblemSpec& spec, double lambda, double radius, ScalarField& v,
                         double& value) {
    const ScalarField r = gradient(spec, lambda, v);
    ScalarField d = solve_poisson(r);
    // project out the radial component so steps stay near the sphere
    const double radial = inner_h10(d, v) / (radius * radius);
    add_scaled(d, -radial, v);
    const double pairing = inner_l2(r, d);  // = ||d_tangential||_H1^2 >= 0
    const double dnorm = norm_h10(d);
    if (!(dnorm > 1e-14 * radius)) return false;

    // full Sobolev step first; Armijo backtracking handles the nonquadratic part
    double alpha = 1.0;
    for (int bt = 0; bt < 60; ++bt) {
        ScalarField trial = v;
        add_scaled(trial, -alpha, d);
        rescale_h10(trial, radius);
        const double trial_value = energy(spec, lambda, trial).total;
        if (trial_value <= value - kArmijo * alpha * pairing) {
            v = std::move(trial);
            value = trial_value;
            return true;
        }
        alpha *= kBacktrack;
    }
    return false;
}

struct DescentResult {
    ScalarField v;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
};

// Sobolev-gradient descent with Armijo backtracking. When radius > 0 the
// iterate is projected back onto the ball ||v|| <= radius (exact projection
// in the H^1_0 norm is a rescale).
DescentResult descend(const ProblemSpec& spec, double lambda, ScalarField v, double radius,
                      double grad_target, int max_steps, const char* stage) {
    double value = energy(spec, lambda, v).total;
    double gn = 0.0;
    for (int it = 0; it < max_steps; ++it) {
        const ScalarField r = gradient(spec, lambda, v);
        gn = norm_l2(r);
        if (gn <= grad_target) return {std::move(v), value, gn, it};
        const ScalarField d = solve_poisson(r);
        const double pairing = inner_l2(r, d);  // = ||r||_{H^-1}^2 >= 0

        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 70; ++bt) {
            ScalarField trial = v;
            add_scaled(trial, -alpha, d);
            bool projected = false;
            if (radius > 0.0) {
                const double nrm = norm_h10(trial);
                if (nrm > radius) {
                    scale(trial, radius / nrm);
                    projected = true;
                }
            }
            const double trial_value = energy(spec, lambda, trial).total;
            const bool ok = projected ? trial_value < value
                                      : trial_value <= value - kArmijo * alpha * pairing;
            if (ok) {
                v = std::move(trial);
                value = trial_value;
                accepted = true;
                break;
            }
            alpha *= kBacktrack;
        }
        if (!accepted)
            throw ConvergenceError(stage, "line search stalled before reaching the Newton gate", gn);
    }
    throw ConvergenceError(stage, "descent exhausted its iteration budget", gn);
}

// Transform a critical point back to the quasilinear unknown and finish it
// with the u-side Newton solve when the raw transform misses the strong-form
// tolerance. Returns the certified pair; raw_residual reports the transfer
// defect of the plain nodewise transform.
TransformPair finish_pair(const ProblemSpec& spec, double lambda, const ScalarField& v,
                          const SolveOptions& opts, double& raw_residual) {
    TransformPair pair = verify_pair(spec, lambda, v, opts.tol_p);
    raw_residual = pair.residual_p;
    if (pair.residual_p > opts.tol_p) {
        const QuasilinearSolution refined =
            refine_quasilinear(spec, pair.u, std::min(1e-8, opts.tol_p));
        if (refined.converged) {
            pair.u = refined.u;
            pair.residual_p = refined.residual;
            pair.positivity_margin = interior_min_margin(pair.u);
            const ScalarField u_back = u_from_v(v_from_u(pair.u, spec.mu, lambda), spec.mu, lambda);
            double rt = 0.0;
            for (std::size_t i = 0; i < pair.u.size(); ++i)
                rt = std::max(rt, std::abs(pair.u[i] - u_back[i]));
            pair.roundtrip_error = rt;
            pair.success = pair.residual_p <= opts.tol_p && pair.positivity_margin > 0.0;
        }
    }
    return pair;
}

// tau > 0 with I(tau * dir) < 0; exists whenever f is nontrivial.
double negative_energy_scale(const ProblemSpec& spec, double lambda, const ScalarField& dir,
                             double tau0) {
    double tau = tau0;
    for (int i = 0; i < 200; ++i) {
        ScalarField v = dir;
        scale(v, tau);
        if (energy(spec, lambda, v).total < 0.0) return tau;
        tau *= 0.5;
    }
    throw GeometryError("ball-minimize", "could not find a negative energy value near zero");
}

std::vector<std::size_t> axis_neighbors(const Grid& g, std::size_t idx) {
    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    const std::size_t s1 = static_cast<std::size_t>(m0);
    const std::size_t s2 = s1 * static_cast<std::size_t>(m1);
    const int i = static_cast<int>(idx % s1);
    const int j = static_cast<int>((idx / s1) % static_cast<std::size_t>(m1));
    const int k = static_cast<int>(idx / s2);
    std::vector<std::size_t> nb;
    if (i > 0) nb.push_back(idx - 1);
    if (i + 1 < m0) nb.push_back(idx + 1);
    if (j > 0) nb.push_back(idx - s1);
    if (j + 1 < m1) nb.push_back(idx + s1);
    if (g.dimension() == 3) {
        if (k > 0) nb.push_back(idx - s2);
        if (k + 1 < m2) nb.push_back(idx + s2);
    }
    return nb;
}

bool touches_domain_boundary(const Grid& g, std::size_t idx) {
    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    const std::size_t s1 = static_cast<std::size_t>(m0);
    const std::size_t s2 = s1 * static_cast<std::size_t>(m1);
    const int i = static_cast<int>(idx % s1);
    const int j = static_cast<int>((idx / s1) % static_cast<std::size_t>(m1));
    const int k = static_cast<int>(idx / s2);
    if (i == 0 || i + 1 == m0 || j == 0 || j + 1 == m1) return true;
    if (g.dimension() == 3 && (k == 0 || k + 1 == m2)) return true;
    return false;
}

void redistribute_by_arclength(std::vector<ScalarField>& path) {
    const std::size_t m = path.size();
    std::vector<double> cum(m, 0.0);
    for (std::size_t j = 0; j + 1 < m; ++j) {
        ScalarField diff = path[j + 1];
        add_scaled(diff, -1.0, path[j]);
        cum[j + 1] = cum[j] + norm_h10(diff);
    }
    const double total = cum.back();
    if (!(total > 0.0)) throw GeometryError("mountain-pass", "deformation path collapsed to a point");

    std::vector<ScalarField> fresh(path.size());
    fresh[0] = path[0];
    fresh[m - 1] = path[m - 1];
    std::size_t seg = 0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(m - 1);
        while (seg + 2 < m && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double theta = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        ScalarField node = path[seg];
        scale(node, 1.0 - theta);
        add_scaled(node, theta, path[seg + 1]);
        fresh[i] = std::move(node);
    }
    path = std::move(fresh);
}

}  // namespace

ScalarField solve_poisson(const ScalarField& rhs, double rel_tol) {
    const Grid& g = rhs.grid();
    LinearOp op = [&g](std::span<const double> in, std::span<double> out) {
        apply_neg_laplacian(g, in, out);
    };
    std::vector<double> x;
    KrylovResult kr = conjugate_gradient(op, rhs.values(), x, rel_tol,
                                         static_cast<int>(20 * rhs.size() + 200));
    if (!kr.converged)
        throw ConvergenceError("numerics", "Poisson solve did not converge", kr.residual);
    return ScalarField(g, std::move(x));
}

GeometryParams select_lambda(const ProblemSpec& spec, const SolveOptions& opts,
                             const EigenResult* gate) {
    if (!(opts.theta > 0.0 && opts.theta < 1.0))
        throw ConfigError("theta must lie in (0,1), got " + std::to_string(opts.theta));
    if (!(opts.p > 1.0)) throw ConfigError("p must exceed 1, got " + std::to_string(opts.p));
    if (spec.grid.dimension() == 3) {
        const double q_conj = spec.q / (spec.q - 1.0);
        if (!((opts.p + 1.0) * q_conj < 6.0))
            throw ConfigError("inadmissible growth exponent: (p+1)q' = " +
                              std::to_string((opts.p + 1.0) * q_conj) + " must stay below 2* = 6");
    }

    EigenResult gate_local;
    if (gate == nullptr) {
        ScalarField V(spec.grid);
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = -spec.c[i] - spec.mu * spec.f[i];
        gate_local = principal_eigenvalue(V, opts.eigen);
        gate = &gate_local;
    }
    if (!(gate->value > 0.0))
        throw RegimeError("spectral-gate", "lambda_1(-c - mu f) = " + std::to_string(gate->value) +
                                               " <= 0: sphere geometry unavailable");

    std::mt19937_64 rng(opts.seed);
    const bool pinned = opts.lambda_override > 0.0;
    double lam = pinned ? opts.lambda_override : std::max(opts.lambda_start, 1e-300);

    // deterministic structured probes: the gate eigenfunction and the Riesz
    // representative of f (both directions where the linear term bites)
    std::vector<ScalarField> structured;
    structured.push_back(gate->eigenfunction);
    if (spec.f_nontrivial()) structured.push_back(solve_poisson(spec.f));

    while (lam <= opts.lambda_cap) {
        const double radius = std::pow(lam, -opts.theta);
        double worst = std::numeric_limits<double>::infinity();
        ScalarField worst_probe;
        auto consider = [&](ScalarField probe) {
            rescale_h10(probe, radius);
            const double e = energy(spec, lam, probe).total;
            if (e < worst) {
                worst = e;
                worst_probe = std::move(probe);
            }
        };
        for (const auto& s : structured) consider(s);
        for (int k = 0; k < opts.sphere_probes; ++k) consider(random_direction(spec.grid, rng));

        double value = worst;
        ScalarField v = worst_probe;
        for (int it = 0; it < opts.sphere_descent_steps && worst > 0.0; ++it) {
            if (!sphere_descent_step(spec, lam, radius, v, value)) break;
            worst = std::min(worst, value);
        }

        if (worst > 0.0) return GeometryParams{lam, opts.theta, opts.p, radius, worst};
        if (pinned)
            throw GeometryError("select-lambda",
                                "sphere minimum estimate is not positive at pinned lambda = " +
                                    std::to_string(lam));
        lam *= 2.0;
    }
    throw GeometryError("select-lambda", "no lambda up to the cap " + std::to_string(opts.lambda_cap) +
                                             " produced a positive sphere minimum");
}

CriticalPoint minimize_in_ball(const ProblemSpec& spec, const GeometryParams& geom,
                               const SolveOptions& opts, const ScalarField* start_direction) {
    const double lambda = geom.lambda;
    const double radius = geom.radius;

    if (!spec.f_nontrivial()) {
        // without the linear term the origin minimizes the ball problem
        CriticalPoint out;
        out.v = ScalarField(spec.grid);
        out.energy = 0.0;
        out.grad_norm = norm_l2(gradient(spec, lambda, out.v));
        out.kind = CriticalKind::BallMinimizer;
        out.converged = true;
        return out;
    }

    ScalarField dir;
    if (start_direction != nullptr) {
        dir = *start_direction;
    } else {
        ScalarField V(spec.grid);
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = -spec.c[i] - spec.mu * spec.f[i];
        dir = principal_eigenvalue(V, opts.eigen).eigenfunction;
    }
    rescale_h10(dir, 1.0);
    const double tau = negative_energy_scale(spec, lambda, dir, 0.5 * radius);
    ScalarField v = dir;
    scale(v, tau);

    DescentResult dr =
        descend(spec, lambda, std::move(v), radius, opts.newton_gate, opts.max_descent, "ball-minimize");
    CriticalPoint cp = newton_refine(spec, lambda, dr.v, opts, CriticalKind::BallMinimizer);
    if (!cp.converged)
        throw ConvergenceError("ball-minimize", "Newton refinement stalled", cp.grad_norm);
    cp.iterations += dr.iterations;

    const double vnorm = norm_h10(cp.v);
    if (vnorm >= radius * (1.0 - 1e-12))
        throw GeometryError("ball-minimize",
                            "minimizer touched the sphere (norm " + std::to_string(vnorm) + " vs radius " +
                                std::to_string(radius) + "): geometry estimate violated");
    if (!(cp.energy < 0.0))
        throw ConvergenceError("ball-minimize", "ball minimizer has nonnegative energy", cp.grad_norm);
    return cp;
}

CriticalPoint minimize_unconstrained(const ProblemSpec& spec, double lambda, const SolveOptions& opts,
                                     const ScalarField* start) {
    ScalarField v;
    if (start != nullptr) {
        v = *start;
    } else if (spec.f_nontrivial()) {
        ScalarField V(spec.grid);
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = -spec.c[i] - spec.mu * spec.f[i];
        ScalarField dir = principal_eigenvalue(V, opts.eigen).eigenfunction;
        rescale_h10(dir, 1.0);
        const double tau = negative_energy_scale(spec, lambda, dir, 1.0);
        v = dir;
        scale(v, tau);
    } else {
        v = ScalarField(spec.grid);
    }

    DescentResult dr =
        descend(spec, lambda, std::move(v), 0.0, opts.newton_gate, opts.max_descent, "minimize");
    CriticalPoint cp = newton_refine(spec, lambda, dr.v, opts, CriticalKind::BallMinimizer);
    if (!cp.converged) throw ConvergenceError("minimize", "Newton refinement stalled", cp.grad_norm);
    cp.iterations += dr.iterations;
    return cp;
}

ScalarField construct_v0(const ProblemSpec& spec, const GeometryParams& geom, const SolveOptions& opts,
                         int extra_doublings) {
    (void)opts;
    const Grid& g = spec.grid;
    if (!spec.c_positive_part_nontrivial())
        throw RegimeError("construct-v0",
                          "c+ is identically zero: the two-solution geometry does not apply");

    // largest connected component of {c > 0}
    const std::size_t n = g.interior_size();
    std::vector<int> comp(n, -1);
    int n_comp = 0;
    std::vector<std::size_t> best_comp_nodes;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (spec.c[seed] <= 0.0 || comp[seed] >= 0) continue;
        std::vector<std::size_t> nodes;
        std::deque<std::size_t> queue{seed};
        comp[seed] = n_comp;
        while (!queue.empty()) {
            const std::size_t cur = queue.front();
            queue.pop_front();
            nodes.push_back(cur);
            for (std::size_t nb : axis_neighbors(g, cur)) {
                if (spec.c[nb] > 0.0 && comp[nb] < 0) {
                    comp[nb] = n_comp;
                    queue.push_back(nb);
                }
            }
        }
        if (nodes.size() > best_comp_nodes.size()) best_comp_nodes = std::move(nodes);
        ++n_comp;
    }

    // bump profile: graph distance to the component boundary
    std::vector<int> dist(n, 0);
    std::deque<std::size_t> queue;
    const int target_comp = comp[best_comp_nodes.front()];
    for (std::size_t idx : best_comp_nodes) {
        bool edge = touches_domain_boundary(g, idx);
        if (!edge)
            for (std::size_t nb : axis_neighbors(g, idx))
                if (comp[nb] != target_comp) edge = true;
        if (edge) {
            dist[idx] = 1;
            queue.push_back(idx);
        }
    }
    if (queue.empty() && !best_comp_nodes.empty()) {
        // component covers the whole interior; seed from the domain boundary
        for (std::size_t idx : best_comp_nodes)
            if (touches_domain_boundary(g, idx)) {
                dist[idx] = 1;
                queue.push_back(idx);
            }
    }
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        for (std::size_t nb : axis_neighbors(g, cur)) {
            if (comp[nb] == target_comp && dist[nb] == 0) {
                dist[nb] = dist[cur] + 1;
                queue.push_back(nb);
            }
        }
    }

    ScalarField profile(g);
    for (std::size_t i = 0; i < n; ++i)
        if (comp[i] == target_comp) profile[i] = static_cast<double>(dist[i]);
    rescale_h10(profile, 1.0);

    double t = 2.0 * geom.radius;
    double reached = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
        ScalarField v = profile;
        scale(v, t);
        reached = energy(spec, geom.lambda, v).total;
        if (reached < 0.0) {
            for (int extra = 0; extra < extra_doublings;) {
                ScalarField vx = profile;
                scale(vx, t * 2.0);
                const double e = energy(spec, geom.lambda, vx).total;
                if (e < reached) {
                    t *= 2.0;
                    reached = e;
                    ++extra;
                } else {
                    break;  // keep the certified negative value
                }
            }
            ScalarField out = profile;
            scale(out, t);
            return out;
        }
        t *= 2.0;
        if (t > 1e60)
            throw GeometryError("construct-v0",
                                "scaling guard exceeded: the positive part of c is too thin on this "
                                "grid to drive the energy negative");
    }
    throw GeometryError("construct-v0", "could not drive the energy negative along the bump ray");
}

namespace {

// Damped Newton without the entry gate; shared by the public refine and the
// mountain-pass handoff (which guards acceptance by basin distance instead).
CriticalPoint newton_iterate(const ProblemSpec& spec, double lambda, const ScalarField& v_init,
                             const SolveOptions& opts, CriticalKind kind) {
    const Grid& g = spec.grid;
    const std::size_t n = g.interior_size();
    ScalarField v = v_init;
    ScalarField r = gradient(spec, lambda, v);
    double gn = norm_l2(r);

    CriticalPoint best;
    best.v = v;
    best.energy = energy(spec, lambda, v).total;
    best.grad_norm = gn;
    best.kind = kind;
    best.converged = gn <= opts.tol_newton;
    if (best.converged) {
        best.level = best.energy;
        return best;
    }

    std::vector<double> diag(n);
    double gn_prev = gn;
    double eta = 1e-4;
    for (int it = 0; it < opts.max_newton; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = v[i] > 0.0
                          ? spec.c[i] + spec.mu * spec.f[i] + spec.c[i] * kernels::g_prime(lambda, v[i])
                          : 0.0;
        }
        LinearOp jac = [&](std::span<const double> in, std::span<double> out) {
            apply_neg_laplacian(g, in, out);
            for (std::size_t i = 0; i < n; ++i) out[i] -= diag[i] * in[i];
        };
        std::vector<double> delta;
        KrylovResult kr =
            solve_spd_or_indefinite(jac, r.values(), delta, eta, static_cast<int>(20 * n + 200));
        if (!kr.converged && kr.residual > 0.5 * norm2(r.values())) break;  // no usable direction

        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            ScalarField trial = v;
            for (std::size_t i = 0; i < n; ++i) trial[i] -= step * delta[i];
            ScalarField r_trial = gradient(spec, lambda, trial);
            const double gn_trial = norm_l2(r_trial);
            if (gn_trial <= (1.0 - kArmijo * step) * gn) {
                v = std::move(trial);
                r = std::move(r_trial);
                gn_prev = gn;
                gn = gn_trial;
                accepted = true;
                break;
            }
            step *= kBacktrack;
        }
        if (!accepted) break;

        best.v = v;
        best.energy = energy(spec, lambda, v).total;
        best.grad_norm = gn;
        best.iterations = it + 1;
        if (gn <= opts.tol_newton) {
            best.converged = true;
            best.level = best.energy;
            return best;
        }
        const double ratio = gn / gn_prev;
        eta = std::clamp(0.5 * ratio * ratio, 1e-12, 1e-2);
    }
    best.level = best.energy;
    best.converged = gn <= opts.tol_newton;
    return best;
}

}  // namespace

CriticalPoint newton_refine(const ProblemSpec& spec, double lambda, const ScalarField& v_init,
                            const SolveOptions& opts, CriticalKind kind) {
    const double gn = norm_l2(gradient(spec, lambda, v_init));
    if (gn > opts.newton_gate)
        throw ConfigError("newton_refine requires a nearly critical start: gradient norm " +
                          std::to_string(gn) + " exceeds the gate " + std::to_string(opts.newton_gate));
    return newton_iterate(spec, lambda, v_init, opts, kind);
}

QuasilinearSolution refine_quasilinear(const ProblemSpec& spec, const ScalarField& u_init, double tol,
                                       int max_iter) {
    const Grid& g = spec.grid;
    const std::size_t n = g.interior_size();

    auto residual_field = [&](const ScalarField& u) {
        ScalarField rho = apply_neg_laplacian(u);
        const ScalarField gsq = grad_squared(u);
        for (std::size_t i = 0; i < n; ++i)
            rho[i] -= spec.c[i] * u[i] + spec.mu * gsq[i] + spec.f[i];
        return rho;
    };

    QuasilinearSolution out;
    out.u = u_init;
    ScalarField rho = residual_field(out.u);
    out.residual = norm_l2(rho);
    out.converged = out.residual <= tol;

    for (int it = 0; it < max_iter && !out.converged; ++it) {
        std::vector<ScalarField> du;
        for (int d = 0; d < g.dimension(); ++d) du.push_back(grad_component(out.u, d));
        // J delta = A delta - c delta - 2 mu sum_d (D_d u)(D_d delta); the
        // first-order term makes J nonsymmetric
        LinearOp jac = [&](std::span<const double> in, std::span<double> o) {
            ScalarField delta(g, std::vector<double>(in.begin(), in.end()));
            apply_neg_laplacian(g, in, o);
            for (std::size_t i = 0; i < n; ++i) o[i] -= spec.c[i] * in[i];
            for (int d = 0; d < g.dimension(); ++d) {
                const ScalarField dd = grad_component(delta, d);
                for (std::size_t i = 0; i < n; ++i) o[i] -= 2.0 * spec.mu * du[static_cast<std::size_t>(d)][i] * dd[i];
            }
        };
        std::vector<double> step;
        KrylovResult kr = bicgstab(jac, rho.values(), step, 1e-10, static_cast<int>(20 * n + 200));
        if (!kr.converged && kr.residual > 0.5 * norm2(rho.values())) break;

        double s = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            ScalarField trial = out.u;
            for (std::size_t i = 0; i < n; ++i) trial[i] -= s * step[i];
            ScalarField rho_trial = residual_field(trial);
            const double r_trial = norm_l2(rho_trial);
            if (r_trial <= (1.0 - kArmijo * s) * out.residual) {
                out.u = std::move(trial);
                rho = std::move(rho_trial);
                out.residual = r_trial;
                accepted = true;
                break;
            }
            s *= kBacktrack;
        }
        if (!accepted) break;
        out.iterations = it + 1;
        out.converged = out.residual <= tol;
    }
    return out;
}

CriticalPoint mountain_pass(const ProblemSpec& spec, const GeometryParams& geom, const ScalarField& v0,
                            const SolveOptions& opts, PathTrace* trace) {
    const double lambda = geom.lambda;
    const int m = std::max(opts.path_nodes, 5);
    const double v0_energy = energy(spec, lambda, v0).total;
    if (!(v0_energy < 0.0))
        throw GeometryError("mountain-pass", "endpoint energy must be negative, got " +
                                                 std::to_string(v0_energy));
    if (!(norm_h10(v0) > geom.radius))
        throw GeometryError("mountain-pass", "endpoint must lie outside the sphere");

    std::vector<ScalarField> path(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        path[static_cast<std::size_t>(k)] = v0;
        scale(path[static_cast<std::size_t>(k)], static_cast<double>(k) / static_cast<double>(m - 1));
    }
    std::vector<double> e(path.size());
    for (std::size_t k = 0; k < path.size(); ++k) e[k] = energy(spec, lambda, path[k]).total;

    auto segment_lengths = [&](std::vector<double>& len) {
        len.assign(path.size() - 1, 0.0);
        for (std::size_t j = 0; j + 1 < path.size(); ++j) {
            ScalarField diff = path[j + 1];
            add_scaled(diff, -1.0, path[j]);
            len[j] = norm_h10(diff);
        }
    };

    auto emit_trace = [&]() {
        if (trace == nullptr) return;
        std::vector<double> len;
        segment_lengths(len);
        trace->arclength.assign(path.size(), 0.0);
        trace->energy = e;
        for (std::size_t j = 1; j < path.size(); ++j)
            trace->arclength[j] = trace->arclength[j - 1] + len[j - 1];
        const double total = trace->arclength.back();
        if (total > 0.0)
            for (auto& a : trace->arclength) a /= total;
    };

    auto finish = [&](CriticalPoint cp, std::size_t kmax, int outer) {
        cp.level = cp.energy;
        cp.iterations += outer;
        if (cp.level < geom.sphere_min)
            throw GeometryError("mountain-pass",
                                "refined level " + std::to_string(cp.level) +
                                    " fell below the sphere estimate; retry with larger lambda");
        path[kmax] = cp.v;
        e[kmax] = cp.energy;
        emit_trace();
        return cp;
    };

    const bool debug = std::getenv("MPS_MP_DEBUG") != nullptr;
    std::vector<double> len;
    double gn = std::numeric_limits<double>::infinity();
    double trial_gate = -1.0;  // set from the first max-node gradient
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        std::size_t kmax = 0;
        for (std::size_t k = 1; k < e.size(); ++k)
            if (e[k] > e[kmax]) kmax = k;  // ties keep the lowest index
        if (debug && outer % 200 == 0) {
            ScalarField rr = gradient(spec, lambda, path[kmax]);
            std::fprintf(stderr, "[mp] outer=%d kmax=%zu e=%.6e gn=%.3e |v|=%.3e\n", outer, kmax,
                         e[kmax], norm_l2(rr), norm_h10(path[kmax]));
        }
        if (kmax == 0 || kmax + 1 == e.size())
            throw GeometryError("mountain-pass", "path maximum migrated to an endpoint");
        if (e[kmax] < geom.sphere_min)
            throw GeometryError("mountain-pass",
                                "path maximum " + std::to_string(e[kmax]) +
                                    " collapsed below the sphere level estimate " +
                                    std::to_string(geom.sphere_min) + "; retry with larger lambda");

        ScalarField r = gradient(spec, lambda, path[kmax]);
        gn = norm_l2(r);
        if (trial_gate < 0.0) trial_gate = 0.25 * gn;
        if (gn <= opts.tol_path) {
            CriticalPoint cp = newton_refine(spec, lambda, path[kmax], opts, CriticalKind::MountainPass);
            if (!cp.converged)
                throw ConvergenceError("mountain-pass", "Newton refinement at the path maximum stalled",
                                       cp.grad_norm);
            return finish(std::move(cp), kmax, outer);
        }
        if (gn <= trial_gate) {
            // early handoff: accept a damped-Newton solve from the path
            // maximum when it stays inside the path's resolution (same
            // saddle basin); otherwise keep deforming and retry once the
            // gradient has dropped by another factor of four
            segment_lengths(len);
            const double total = std::accumulate(len.begin(), len.end(), 0.0);
            const double spacing = total / static_cast<double>(m - 1);
            CriticalPoint cp = newton_iterate(spec, lambda, path[kmax], opts, CriticalKind::MountainPass);
            if (cp.converged && cp.energy >= geom.sphere_min) {
                ScalarField moved = cp.v;
                add_scaled(moved, -1.0, path[kmax]);
                if (norm_h10(moved) <= 2.0 * spacing) return finish(std::move(cp), kmax, outer);
            }
            trial_gate = 0.25 * gn;
        }

        const ScalarField d = solve_poisson(r);
        const double pairing = inner_l2(r, d);
        double alpha = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 70; ++bt) {
            ScalarField trial = path[kmax];
            add_scaled(trial, -alpha, d);
            const double trial_value = energy(spec, lambda, trial).total;
            if (trial_value <= e[kmax] - kArmijo * alpha * pairing) {
                path[kmax] = std::move(trial);
                e[kmax] = trial_value;
                accepted = true;
                break;
            }
            alpha *= kBacktrack;
        }
        if (!accepted)
            throw ConvergenceError("mountain-pass", "line search stalled at the path maximum", gn);

        // re-spline only when a step stretched some segment past the spacing
        // bound; interpolation resets the node energies
        segment_lengths(len);
        const double total = std::accumulate(len.begin(), len.end(), 0.0);
        const double bound = 1.8 * total / static_cast<double>(m - 1);
        double widest = 0.0;
        for (double L : len) widest = std::max(widest, L);
        if (widest > bound) {
            redistribute_by_arclength(path);
            for (std::size_t k = 1; k + 1 < path.size(); ++k)
                e[k] = energy(spec, lambda, path[k]).total;
        }
    }
    throw ConvergenceError("mountain-pass", "deformation exhausted its iteration budget", gn);
}

SolveOutcome solve_two(const ProblemSpec& spec, const SolveOptions& opts) {
    spec.check_hypothesis();

    SolveOutcome out;
    StageClock clock(out.timings);
    clock.tick("spectral-gate");

    ScalarField minus_c(spec.grid);
    ScalarField gate_potential(spec.grid);
    for (std::size_t i = 0; i < spec.c.size(); ++i) {
        minus_c[i] = -spec.c[i];
        gate_potential[i] = -spec.c[i] - spec.mu * spec.f[i];
    }

    const EigenResult eig_minus_c = principal_eigenvalue(minus_c, opts.eigen);
    out.lambda1_minus_c = eig_minus_c.value;
    if (!(eig_minus_c.value > 0.0))
        throw RegimeError("spectral-gate",
                          "lambda_1(-c) = " + std::to_string(eig_minus_c.value) +
                              " <= 0: a nonnegative solution requires lambda_1(-c) > 0");

    const EigenResult eig_gamma = weighted_eigenvalue(spec.c, spec.f, opts.eigen);
    out.gamma1 = eig_gamma.value;

    const EigenResult gate = principal_eigenvalue(gate_potential, opts.eigen);
    out.lambda1_gate = gate.value;
    if (!(gate.value > 0.0)) {
        bool c_nonneg = true;
        for (double ci : spec.c.values())
            if (ci < 0.0) c_nonneg = false;
        std::string msg = "regime gate failed: lambda_1(-c - mu f) = " + std::to_string(gate.value) +
                          " <= 0 (equivalently mu = " + std::to_string(spec.mu) +
                          " >= gamma_1(-c,f) = " + std::to_string(out.gamma1) + ")";
        if (c_nonneg)
            msg += "; for c >= 0 the condition lambda_1(-c - mu f) > 0 is necessary for a "
                   "nonnegative solution";
        throw RegimeError("spectral-gate", msg);
    }

    out.coercivity = coercivity_constant(gate_potential, /*assume_gate_checked=*/true, opts.eigen);
    out.alpha_c = zero_set_eigenvalue(spec.c, spec.f, spec.mu, opts.eigen);

    if (!spec.c_positive_part_nontrivial()) {
        clock.tick("minimize");
        const double lambda = opts.lambda_override > 0.0 ? opts.lambda_override
                                                         : std::max(1.0, opts.lambda_start);
        out.two_solution_mode = false;
        out.mode_note = "c+ identically zero: uniqueness regime, computing the single solution";
        out.geometry = GeometryParams{lambda, opts.theta, opts.p, 0.0, 0.0};
        out.minimizer = minimize_unconstrained(spec, lambda, opts);
        clock.tick("transform");
        out.pair1 = finish_pair(spec, lambda, out.minimizer.v, opts, out.transform_residual_p1);
        clock.stop();
        if (!out.pair1.success)
            throw ConvergenceError("transform",
                                   "solution failed the residual/positivity certificate: residual_P = " +
                                       std::to_string(out.pair1.residual_p) + ", margin = " +
                                       std::to_string(out.pair1.positivity_margin),
                                   out.pair1.residual_p);
        return out;
    }

    out.two_solution_mode = true;
    out.mode_note = "sign-changing regime: two-solution pipeline";

    SolveOptions local = opts;
    CriticalPoint v1, w1;
    bool done = false;
    for (int attempt = 0; attempt <= opts.geometry_retries && !done; ++attempt) {
        clock.tick("select-lambda");
        out.geometry = select_lambda(spec, local, &gate);
        clock.tick("minimize-in-ball");
        v1 = minimize_in_ball(spec, out.geometry, local, &gate.eigenfunction);
        clock.tick("construct-v0");
        ScalarField v0 = construct_v0(spec, out.geometry, local);
        clock.tick("mountain-pass");
        try {
            w1 = mountain_pass(spec, out.geometry, v0, local, &out.path_trace);
        } catch (const GeometryError&) {
            if (attempt == opts.geometry_retries) throw;
            local.lambda_start = out.geometry.lambda * 2.0;
            continue;
        }

        ScalarField diff = v1.v;
        add_scaled(diff, -1.0, w1.v);
        out.distinctness = norm_h10(diff);
        out.distinctness_threshold =
            opts.distinct_rel * std::max(norm_h10(v1.v), norm_h10(w1.v));
        if (out.distinctness < out.distinctness_threshold) {
            // perturb the endpoint and rerun the pass once before giving up
            ScalarField v0_pert = construct_v0(spec, out.geometry, local, /*extra_doublings=*/1);
            w1 = mountain_pass(spec, out.geometry, v0_pert, local, &out.path_trace);
            diff = v1.v;
            add_scaled(diff, -1.0, w1.v);
            out.distinctness = norm_h10(diff);
            if (out.distinctness < out.distinctness_threshold)
                throw GeometryError("mountain-pass",
                                    "degenerate geometry: minimizer and mountain-pass point coincide "
                                    "(distance " +
                                        std::to_string(out.distinctness) + ")");
        }
        done = true;
    }

    out.minimizer = v1;
    out.pass = w1;

    clock.tick("transform");
    out.pair1 = finish_pair(spec, out.geometry.lambda, v1.v, opts, out.transform_residual_p1);
    double raw2 = 0.0;
    out.pair2 = finish_pair(spec, out.geometry.lambda, w1.v, opts, raw2);
    out.transform_residual_p2 = raw2;
    clock.stop();

    if (!(v1.energy < 0.0))
        throw ConvergenceError("minimize-in-ball", "ball minimizer energy is not negative", v1.energy);
    if (!(w1.level >= out.geometry.sphere_min))
        throw GeometryError("mountain-pass", "mountain-pass level below the sphere estimate");
    if (!out.pair1.success || !out.pair2->success)
        throw ConvergenceError(
            "transform",
            "a solution failed the residual/positivity certificate (residual_P = " +
                std::to_string(out.pair1.residual_p) + " / " + std::to_string(out.pair2->residual_p) +
                ", margins " + std::to_string(out.pair1.positivity_margin) + " / " +
                std::to_string(out.pair2->positivity_margin) + ")",
            std::max(out.pair1.residual_p, out.pair2->residual_p));
    return out;
}

}  // namespace mps
