#pragma once

#include "mpsolve/grid.hpp"

namespace mps {

// Problem data for -Delta u = c(x) u + mu |grad u|^2 + f(x) on the grid's
// box with zero boundary values. The sign condition on f (nonnegative and
// not identically zero) is part of the solvability hypothesis and is checked
// by the solve pipeline via check_hypothesis(); the raw container accepts
// any finite coefficients so that manufactured-solution tests can use
// sign-free data.
struct ProblemSpec {
    Grid grid;
    ScalarField c;
    ScalarField f;
    double mu = 0.0;
    double q = 0.0;  // Lebesgue exponent of the coefficients, q > N/2

    ProblemSpec(const Grid& grid_, ScalarField c_, ScalarField f_, double mu_, double q_);

    // Throws unless f >= 0 nodewise with at least one strictly positive node.
    void check_hypothesis() const;
    bool f_nonnegative() const;
    bool f_nontrivial() const;
    bool c_positive_part_nontrivial() const;
};

struct EnergyBreakdown {
    double quadratic = 0.0;       // (1/2) int |grad v|^2 - (c + mu f)(v+)^2
    double superquadratic = 0.0;  // -int c * G_lambda(v+)
    double linear = 0.0;          // -(mu/lambda) int f v
    double total = 0.0;           // exact sum of the three parts
};

// Energy of the semilinear formulation at parameter lambda.
EnergyBreakdown energy(const ProblemSpec& spec, double lambda, const ScalarField& v);

// Nodal residual field r with <r, phi>_quadrature = dI(v)[phi] for every
// grid function phi; a critical point has small ||r||_2.
ScalarField gradient(const ProblemSpec& spec, double lambda, const ScalarField& v);

// Quadrature L2 norm of the strong-form residual of the quasilinear problem
// at u; |grad u|^2 uses centered differences with second-order one-sided
// stencils adjacent to the boundary.
double residual_P(const ProblemSpec& spec, const ScalarField& u);

// Strong-form residual of the semilinear problem at v (requires
// 1 + lambda*v > 0 nodewise).
double residual_Q(const ProblemSpec& spec, double lambda, const ScalarField& v);

// Nodewise |grad u|^2 used by residual_P; exposed for tests.
ScalarField grad_squared(const ScalarField& u);

// One component of the discrete gradient: centered differences with
// second-order one-sided stencils adjacent to the boundary (the stencil
// family behind grad_squared and the quasilinear Jacobian).
ScalarField grad_component(const ScalarField& u, int axis);

}  // namespace mps
