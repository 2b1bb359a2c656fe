#include "mpsolve/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mpsolve/errors.hpp"

namespace mps::kernels {

namespace {

constexpr double kSeriesCutoff = 0.25;

// phi(x) = (1+x)ln(1+x) - x = sum_{m>=2} (-1)^m x^m / (m(m-1)).
// The closed form cancels catastrophically for small x; the alternating
// series converges in < 30 terms below the cutoff.
double phi(double x) {
    if (std::abs(x) < kSeriesCutoff) {
        double term = 0.5 * x * x;  // m = 2
        double sum = term;
        for (int m = 3; m < 64; ++m) {
            term *= -x * static_cast<double>(m - 2) / static_cast<double>(m);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (1.0 + x) * std::log1p(x) - x;
}

// Antiderivative core: G(lambda, s) = Gc(lambda*s)/lambda^2 where
// Gc(x) = [ (1+x)^2 (2 ln(1+x) - 1) + 1 ] / 4  -  x^2 / 2
//       = sum_{m>=2} (-1)^m x^{m+1} / ((m-1) m (m+1)).
double G_core(double x) {
    if (std::abs(x) < kSeriesCutoff) {
        double term = x * x * x / 6.0;  // m = 2
        double sum = term;
        for (int m = 3; m < 64; ++m) {
            term *= -x * static_cast<double>(m - 2) / static_cast<double>(m + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    const double one_px = 1.0 + x;
    return 0.25 * (one_px * one_px * (2.0 * std::log1p(x) - 1.0) + 1.0) - 0.5 * x * x;
}

// H core: H(lambda, s) = Hc(lambda*s)/lambda^2 where
// Hc(x) = x^2/4 - phi(x)/2 = sum_{m>=3} (-1)^{m+1} x^m / (2 m (m-1)).
double H_core(double x) {
    if (std::abs(x) < kSeriesCutoff) {
        double term = x * x * x / 12.0;  // m = 3
        double sum = term;
        for (int m = 4; m < 64; ++m) {
            term *= -x * static_cast<double>(m - 2) / static_cast<double>(m);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return 0.25 * x * x - 0.5 * phi(x);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        out.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1)));
    return out;
}

}  // namespace

double g(double lambda, double s) {
    if (s <= 0.0) return 0.0;
    return phi(lambda * s) / lambda;
}

double g_prime(double lambda, double s) {
    if (s < 0.0) return 0.0;
    return std::log1p(lambda * s);
}

double G(double lambda, double s) {
    if (s <= 0.0) return 0.0;
    return G_core(lambda * s) / (lambda * lambda);
}

double H(double lambda, double s) {
    if (s <= 0.0) return 0.0;
    return H_core(lambda * s) / (lambda * lambda);
}

double growth_bound_constant(double eps, double p, double s_max, double lambda_max) {
    if (!(eps > 0.0)) throw ConfigError("growth_bound_constant: eps must be positive");
    if (!(p > 1.0)) throw ConfigError("growth_bound_constant: requires p > 1");
    if (!(s_max > 0.0) || !(lambda_max >= 1.0))
        throw ConfigError("growth_bound_constant: need s_max > 0 and lambda_max >= 1");

    const auto s_grid = log_spaced(std::min(1e-8, s_max), s_max, 400);
    const auto l_grid = log_spaced(1.0, std::max(1.0 + 1e-12, lambda_max), 160);
    double sup = 0.0;
    for (double lam : l_grid) {
        const double weight = 1.0 + std::log(lam);
        for (double s : s_grid) {
            const double excess = G(lam, s) - eps * s * s;
            if (excess <= 0.0) continue;
            sup = std::max(sup, excess / (weight * std::pow(s, p + 1.0)));
        }
    }
    return 1.1 * sup;
}

}  // namespace mps::kernels
