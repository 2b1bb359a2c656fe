#pragma once

#include "mpsolve/functional.hpp"
#include "mpsolve/grid.hpp"

namespace mps {

// Correspondence between solutions of the quasilinear problem (unknown u)
// and its semilinear form (unknown v): v = (e^{mu u} - 1)/lambda and
// u = ln(1 + lambda v)/mu, a monotone bijection on [0, infinity).
struct TransformPair {
    ScalarField u;
    ScalarField v;
    double mu = 0.0;
    double lambda = 0.0;
    double roundtrip_error = 0.0;   // ||u - u_from_v(v_from_u(u))||_inf
    double residual_p = 0.0;
    double residual_q = 0.0;
    double positivity_margin = 0.0; // min nodal u away from a one-cell boundary layer
    double tol_p = 0.0;
    bool success = false;           // residual_p <= tol_p and margin > 0
};

// Nodewise (e^{mu u} - 1)/lambda, expm1-stable. Throws when mu*max(u) > 700
// (overflow guard).
ScalarField v_from_u(const ScalarField& u, double mu, double lambda);

// Nodewise ln(1 + lambda v)/mu, log1p-stable. Requires 1 + lambda v > 0.
ScalarField u_from_v(const ScalarField& v, double mu, double lambda);

// Transform a converged v back to u and collect all transfer diagnostics.
// Nodal values of v in [-1e-6, 0) are clamped to zero first; anything more
// negative is an error.
TransformPair verify_pair(const ProblemSpec& spec, double lambda, const ScalarField& v_solution,
                          double tol_p = 1e-6);

// Minimum nodal value over interior nodes at least one cell away from the
// boundary (all interior nodes when the grid is too small to have any).
double interior_min_margin(const ScalarField& u);

}  // namespace mps
