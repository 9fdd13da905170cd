#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qf/errors.hpp"

namespace qf {

struct CholeskyInfo {
    double jitter = 0.0;  // diagonal shift the factorization finally needed
    int attempts = 1;
};

// Lower Cholesky factor of a symmetric positive-definite matrix (row-major,
// n x n).  On breakdown the factorization restarts with diagonal jitter
// escalating in decade steps 1e-14, 1e-13, ..., capped at 1e-10; past the cap
// a numeric_error names the leading minor that lost positivity.  Only the
// lower triangle of the output is meaningful.
inline CholeskyInfo cholesky_factor(const std::vector<double>& a, std::size_t n,
                                    std::vector<double>& l) {
    if (a.size() != n * n) throw domain_error("cholesky_factor: size mismatch");
    l.assign(n * n, 0.0);
    CholeskyInfo info;
    double jitter = 0.0;
    for (int attempt = 0;; ++attempt) {
        std::size_t bad = n;  // first minor that fails, 1-based when reported
        for (std::size_t i = 0; i < n && bad == n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double* ri = &l[i * n];
                const double* rj = &l[j * n];
                // dot(L_i[0..j), L_j[0..j)) with four lanes for throughput
                double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
                std::size_t k = 0;
                for (; k + 4 <= j; k += 4) {
                    s0 += ri[k] * rj[k];
                    s1 += ri[k + 1] * rj[k + 1];
                    s2 += ri[k + 2] * rj[k + 2];
                    s3 += ri[k + 3] * rj[k + 3];
                }
                for (; k < j; ++k) s0 += ri[k] * rj[k];
                const double dot = (s0 + s1) + (s2 + s3);
                if (i == j) {
                    const double d = a[i * n + i] + jitter - dot;
                    if (!(d > 0.0) || !std::isfinite(d)) {
                        bad = i;
                        break;
                    }
                    l[i * n + i] = std::sqrt(d);
                } else {
                    l[i * n + j] = (a[i * n + j] - dot) / l[j * n + j];
                }
            }
        }
        if (bad == n) {
            info.jitter = jitter;
            info.attempts = attempt + 1;
            return info;
        }
        if (jitter >= 1e-10)
            throw numeric_error("cholesky_factor: leading minor " + std::to_string(bad + 1) +
                                " not positive definite even with jitter 1e-10");
        jitter = jitter == 0.0 ? 1e-14 : jitter * 10.0;
    }
}

// y = L x restricted to the lower triangle (x and y may not alias).
inline void lower_matvec(const std::vector<double>& l, std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ri = &l[i * n];
        double s = 0.0;
        for (std::size_t k = 0; k <= i; ++k) s += ri[k] * x[k];
        y[i] = s;
    }
}

}  // namespace qf
