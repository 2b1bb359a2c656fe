#include "mpsolve/linalg.hpp"

#include <algorithm>

namespace mps {

KrylovResult conjugate_gradient(const LinearOp& apply, std::span<const double> b,
                                std::vector<double>& x, double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    x.assign(n, 0.0);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> p = r;
    std::vector<double> ap(n);

    KrylovResult res;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const double target = rel_tol * bnorm;
    double rr = dot(r, r);
    for (int it = 0; it < max_iter; ++it) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            res.indefinite = true;
            res.iterations = it;
            res.residual = std::sqrt(rr);
            return res;
        }
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_new = dot(r, r);
        res.iterations = it + 1;
        if (std::sqrt(rr_new) <= target) {
            res.converged = true;
            res.residual = std::sqrt(rr_new);
            return res;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res.residual = std::sqrt(rr);
    return res;
}

KrylovResult bicgstab(const LinearOp& apply, std::span<const double> b,
                      std::vector<double>& x, double rel_tol, int max_iter) {
    const std::size_t n = b.size();
    x.assign(n, 0.0);
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> r0 = r;
    std::vector<double> p(n, 0.0), v(n, 0.0), s(n), t(n);

    KrylovResult res;
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        res.converged = true;
        return res;
    }
    const double target = rel_tol * bnorm;
    double rho = 1.0, alpha = 1.0, omega = 1.0;

    for (int it = 0; it < max_iter; ++it) {
        const double rho_new = dot(r0, r);
        if (rho_new == 0.0) break;
        if (it == 0) {
            p = r;
        } else {
            const double beta = (rho_new / rho) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        rho = rho_new;
        apply(p, v);
        const double r0v = dot(r0, v);
        if (r0v == 0.0) break;
        alpha = rho / r0v;
        for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (norm2(s) <= target) {
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
            res.converged = true;
            res.iterations = it + 1;
            res.residual = norm2(s);
            return res;
        }
        apply(s, t);
        const double tt = dot(t, t);
        if (tt == 0.0) break;
        omega = dot(t, s) / tt;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        res.iterations = it + 1;
        const double rn = norm2(r);
        if (rn <= target) {
            res.converged = true;
            res.residual = rn;
            return res;
        }
        if (omega == 0.0) break;
    }
    res.residual = norm2(r);
    return res;
}

KrylovResult solve_spd_or_indefinite(const LinearOp& apply, std::span<const double> b,
                                     std::vector<double>& x, double rel_tol, int max_iter) {
    KrylovResult res = conjugate_gradient(apply, b, x, rel_tol, max_iter);
    if (res.indefinite || !res.converged) {
        KrylovResult res2 = bicgstab(apply, b, x, rel_tol, max_iter);
        res2.indefinite = res.indefinite;
        return res2;
    }
    return res;
}

}  // namespace mps
