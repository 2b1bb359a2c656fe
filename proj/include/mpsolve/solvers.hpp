#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpsolve/functional.hpp"
#include "mpsolve/grid.hpp"
#include "mpsolve/spectral.hpp"
#include "mpsolve/transform.hpp"

namespace mps {

// Parameters of the variational geometry at a chosen lambda: the sphere of
// radius R = lambda^-theta carries a positive energy minimum estimate.
struct GeometryParams {
    double lambda = 0.0;
    double theta = 0.0;
    double p = 0.0;
    double radius = 0.0;      // lambda^-theta
    double sphere_min = 0.0;  // estimated min of the energy on the sphere
};

enum class CriticalKind { BallMinimizer, MountainPass };

struct CriticalPoint {
    ScalarField v;
    double energy = 0.0;
    double grad_norm = 0.0;
    CriticalKind kind = CriticalKind::BallMinimizer;
    double level = 0.0;  // mountain-pass level d (kind == MountainPass)
    bool converged = false;
    int iterations = 0;
};

// Final deformation path, for plot emission: cumulative H^1_0 arclength
// (normalized to [0,1]) against energy at each path node.
struct PathTrace {
    std::vector<double> arclength;
    std::vector<double> energy;
};

struct SolveOptions {
    double theta = 0.5;
    double p = 1.5;
    double lambda_start = 1.0;
    double lambda_cap = 1e12;
    double lambda_override = 0.0;  // > 0: pin lambda instead of doubling
    int sphere_probes = 64;
    int sphere_descent_steps = 60;
    int path_nodes = 41;
    double tol_gradient = 1e-8;  // criticality tolerance reported to callers
    double tol_newton = 1e-10;
    double newton_gate = 1e-3;  // largest gradient norm Newton accepts
    double tol_path = 1e-6;     // deformation stops here, Newton takes over
    double tol_p = 1e-6;
    int max_descent = 5000;
    int max_outer = 20000;
    int max_newton = 60;
    std::uint64_t seed = 12345;
    double distinct_rel = 1e-3;
    int geometry_retries = 2;
    EigenOptions eigen{};
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

// Everything the pipeline learned about one problem instance.
struct SolveOutcome {
    double lambda1_minus_c = 0.0;
    double lambda1_gate = 0.0;  // lambda_1(-c - mu f)
    double gamma1 = 0.0;
    double coercivity = 0.0;  // K1
    double alpha_c = 0.0;     // zero-set diagnostic (+inf sentinel possible)
    GeometryParams geometry{};
    bool two_solution_mode = false;
    std::string mode_note;
    CriticalPoint minimizer;
    std::optional<CriticalPoint> pass;
    TransformPair pair1;
    std::optional<TransformPair> pair2;
    // strong-form residual of the raw nodewise transform, before the
    // quasilinear finish (the O(h^2) transfer defect)
    double transform_residual_p1 = 0.0;
    double transform_residual_p2 = 0.0;
    double distinctness = 0.0;            // ||v1 - w1||_{H^1}
    double distinctness_threshold = 0.0;  // distinct_rel * max(||v1||, ||w1||)
    PathTrace path_trace;
    std::vector<StageTiming> timings;
};

// Solve -Delta d = rhs (zero Dirichlet) by conjugate gradients; the Riesz
// map used for Sobolev-gradient descent directions.
ScalarField solve_poisson(const ScalarField& rhs, double rel_tol = 1e-8);

// Double lambda from lambda_start until the estimated sphere minimum at
// radius lambda^-theta is positive. Probes: random unit directions, the
// principal gate eigenfunction, the Riesz representative of f, then
// sphere-constrained descent from the worst probe. `gate` may carry a
// precomputed principal eigenpair of -Delta - (c + mu f).
GeometryParams select_lambda(const ProblemSpec& spec, const SolveOptions& opts,
                             const EigenResult* gate = nullptr);

// Projected Sobolev-gradient descent in the ball of radius geom.radius,
// started inside the negative-energy well near tau*phi1, finished by Newton.
CriticalPoint minimize_in_ball(const ProblemSpec& spec, const GeometryParams& geom,
                               const SolveOptions& opts, const ScalarField* start_direction = nullptr);

// Unconstrained variant used in the uniqueness regime (c+ == 0) and for
// repeated-start experiments.
CriticalPoint minimize_unconstrained(const ProblemSpec& spec, double lambda, const SolveOptions& opts,
                                     const ScalarField* start = nullptr);

// Bump supported in the largest connected component of {c > 0}, scaled by
// doubling until its energy is negative outside the ball.
ScalarField construct_v0(const ProblemSpec& spec, const GeometryParams& geom, const SolveOptions& opts,
                         int extra_doublings = 0);

// Deforming-path mountain-pass search between 0 and v0.
CriticalPoint mountain_pass(const ProblemSpec& spec, const GeometryParams& geom, const ScalarField& v0,
                            const SolveOptions& opts, PathTrace* trace = nullptr);

// Damped Newton on the criticality residual; requires a locally convergent
// start (gradient norm <= opts.newton_gate). Returns the best iterate with
// converged = false instead of throwing on divergence.
CriticalPoint newton_refine(const ProblemSpec& spec, double lambda, const ScalarField& v_init,
                            const SolveOptions& opts = {},
                            CriticalKind kind = CriticalKind::BallMinimizer);

struct QuasilinearSolution {
    ScalarField u;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Newton solve of the discrete quasilinear system
// -Delta u = c u + mu |grad u|^2 + f. The nodewise transform of a semilinear
// critical point carries an O(h^2) defect against the strong discrete
// operators; warm-starting here removes it, so the reported fields solve the
// quasilinear problem to solver accuracy.
QuasilinearSolution refine_quasilinear(const ProblemSpec& spec, const ScalarField& u_init, double tol,
                                       int max_iter = 12);

// Full pipeline: spectral gates, geometry, both critical points, transform
// back to the quasilinear unknown, and all certificates.
SolveOutcome solve_two(const ProblemSpec& spec, const SolveOptions& opts = {});

}  // namespace mps
