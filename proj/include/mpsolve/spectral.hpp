#pragma once

#include <cstdint>
#include <vector>

#include "mpsolve/grid.hpp"

namespace mps {

struct EigenOptions {
    double tol = 1e-10;     // scaled eigen-residual target
    int max_iter = 10000;   // outer iterations
};

struct EigenResult {
    double value = 0.0;
    ScalarField eigenfunction;  // unit L2 norm, sign-fixed nonnegative for principal modes
    int iterations = 0;
    double residual = 0.0;  // quadrature L2 norm of the pencil residual at exit
};

// Smallest eigenvalue of -Delta + V with zero Dirichlet boundary, computed
// by shift-and-invert power iteration with the shift placed below the
// Gershgorin lower bound (the shifted operator is then positive definite
// and an M-matrix, so iterates from the all-ones start stay nonnegative).
EigenResult principal_eigenvalue(const ScalarField& V, const EigenOptions& opts = {});

// Same, restricted to the index set where mask != 0 (zero Dirichlet data on
// the complement). Used for the zero-set diagnostic.
EigenResult principal_eigenvalue_masked(const ScalarField& V, const std::vector<std::uint8_t>& mask,
                                        const EigenOptions& opts = {});

// Smallest gamma with -Delta u - c u = gamma f u, f >= 0 not identically 0.
// Requires lambda_1(-c) > 0 (checked internally); inverse iteration on the
// pencil (A - M_c, M_f) in the form-inner-product geometry, with Rayleigh
// quotients floored away from degenerate f-weights.
EigenResult weighted_eigenvalue(const ScalarField& c, const ScalarField& f,
                                const EigenOptions& opts = {});

// K1 = min(1, kappa) where kappa is the smallest eigenvalue of the pencil
// (A + M_V) x = kappa A x; gives the discrete lower bound
// int(|grad v|^2 + V (v+)^2) >= K1 ||v||^2 for all fields v.
// Requires lambda_1(V) > 0; pass assume_gate_checked when the caller already
// verified it to skip the extra eigensolve.
double coercivity_constant(const ScalarField& V, bool assume_gate_checked = false,
                           const EigenOptions& opts = {});

// Principal eigenvalue of -Delta - mu f restricted to the discrete zero set
// {|c| <= 1e-12 ||c||_inf}, Dirichlet on its boundary. Returns +infinity
// when the zero set has no interior nodes.
double zero_set_eigenvalue(const ScalarField& c, const ScalarField& f, double mu,
                           const EigenOptions& opts = {});

}  // namespace mps
