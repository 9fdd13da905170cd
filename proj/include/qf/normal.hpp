#pragma once

#include <cmath>

#include "qf/errors.hpp"

namespace qf {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647693;
inline constexpr double sqrt_two = 1.41421356237309504880;
inline constexpr double sqrt_two_pi = 2.50662827463100050242;
inline constexpr double inv_sqrt_two_pi = 0.39894228040143267794;

inline double norm_pdf(double z) { return inv_sqrt_two_pi * std::exp(-0.5 * z * z); }

// Phi(z) evaluated through erfc so both tails keep near-full relative accuracy.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / sqrt_two); }

// 1 - Phi(z).
inline double norm_cdf_c(double z) { return 0.5 * std::erfc(z / sqrt_two); }

// Probabilists' Hermite polynomial He_j.  Only orders 0..4 are supported,
// matching the highest spatial derivative the heat field exposes.
inline double hermite_prob(int j, double z) {
    switch (j) {
        case 0: return 1.0;
        case 1: return z;
        case 2: return z * z - 1.0;
        case 3: return z * (z * z - 3.0);
        case 4: return z * z * (z * z - 6.0) + 3.0;
        default: throw domain_error("hermite_prob: order must be in 0..4");
    }
}

// Inverse of norm_cdf.  Acklam's rational approximation supplies the initial
// guess; one Halley step against norm_cdf polishes it to full precision.
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("norm_quantile: p must lie in (0,1)");

    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley step on f(x) = Phi(x) - p.
    const double e = norm_cdf(x) - p;
    const double u = e * sqrt_two_pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace qf
