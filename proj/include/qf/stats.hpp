#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "qf/errors.hpp"

namespace qf {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw domain_error("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / double(x.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw domain_error("variance: need at least two observations");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / double(x.size() - 1);
}

// Unbiased sample covariance of paired observations.
inline double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw domain_error("covariance: length mismatch");
    if (x.size() < 2) throw domain_error("covariance: need at least two observations");
    const double mx = mean(x), my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / double(x.size() - 1);
}

inline double standard_error_mean(std::span<const double> x) {
    return std::sqrt(variance(x) / double(x.size()));
}

// Excess kurtosis m4/m2^2 - 3 (population moments).
inline double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 4) throw domain_error("excess_kurtosis: need at least four observations");
    const double m = mean(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m, d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= double(x.size());
    m4 /= double(x.size());
    if (!(m2 > 0.0)) throw numeric_error("excess_kurtosis: zero variance");
    return m4 / (m2 * m2) - 3.0;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares y ~ slope * x + intercept.
inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw domain_error("least_squares: length mismatch");
    if (x.size() < 2) throw domain_error("least_squares: need at least two points");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw domain_error("least_squares: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

}  // namespace qf
