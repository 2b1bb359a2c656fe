#pragma once

namespace mps::kernels {

// Nonlinear kernel family used by the semilinear formulation. All four
// functions vanish identically for s <= 0 and are evaluated with
// log1p/series forms that stay accurate for lambda*s << 1.

// g(lambda, s) = (1/lambda)(1+lambda s)ln(1+lambda s) - s   for s >= 0.
double g(double lambda, double s);

// d/ds g(lambda, s) = ln(1+lambda s) for s >= 0.
double g_prime(double lambda, double s);

// Antiderivative of g with G(lambda, 0) = 0, in closed form.
double G(double lambda, double s);

// H(lambda, s) = s^2/4 + s/(2 lambda) - (s/(2 lambda)) ln(1+lambda s)
//              - (1/(2 lambda^2)) ln(1+lambda s); equals g*s/2 - G.
double H(double lambda, double s);

// Sampled supremum of (G_lambda(s) - eps*s^2)/((1+ln lambda) s^(p+1)) over a
// log-spaced lattice (0, s_max] x [1, lambda_max], inflated by 10%. The
// returned C satisfies G_lambda(s) <= eps*s^2 + C (1+ln lambda) s^(p+1) on
// the sampled region; it is an empirical constant, not a proof.
double growth_bound_constant(double eps, double p, double s_max, double lambda_max);

}  // namespace mps::kernels
