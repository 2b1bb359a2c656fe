#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mps {

struct KrylovResult {
    int iterations = 0;
    double residual = 0.0;  // Euclidean norm of b - A x at exit
    bool converged = false;
    bool indefinite = false;  // CG hit non-positive curvature
};

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

// Conjugate gradients for symmetric positive definite operators.
// Stops when ||r|| <= rel_tol * ||b||. Sets `indefinite` and returns early
// if a search direction has non-positive curvature.
KrylovResult conjugate_gradient(const LinearOp& apply, std::span<const double> b,
                                std::vector<double>& x, double rel_tol, int max_iter);

// BiCGStab fallback for symmetric indefinite systems (Newton near a saddle).
KrylovResult bicgstab(const LinearOp& apply, std::span<const double> b,
                      std::vector<double>& x, double rel_tol, int max_iter);

// Solve, falling back to BiCGStab when CG detects indefiniteness.
KrylovResult solve_spd_or_indefinite(const LinearOp& apply, std::span<const double> b,
                                     std::vector<double>& x, double rel_tol, int max_iter);

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace mps
