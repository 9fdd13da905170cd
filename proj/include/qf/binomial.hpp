#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qf/errors.hpp"

namespace qf {

namespace detail {

inline double log_choose(std::size_t m, std::size_t k) {
    return std::lgamma(double(m) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(m - k) + 1.0);
}

}  // namespace detail

// Full pmf of Binomial(m, p), anchored at the mode and extended outward by the
// one-step ratio pmf(k+1)/pmf(k) = ((m-k)/(k+1)) (p/q).  Anchoring keeps the
// relative error flat across the support instead of compounding from k = 0.
inline std::vector<double> binomial_pmf(std::size_t m, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binomial_pmf: p must lie in [0,1]");
    std::vector<double> pmf(m + 1, 0.0);
    if (p == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p == 1.0) {
        pmf[m] = 1.0;
        return pmf;
    }
    const double q = 1.0 - p;
    const std::size_t mode = std::min(m, std::size_t(double(m + 1) * p));
    pmf[mode] = std::exp(detail::log_choose(m, mode) + double(mode) * std::log(p) +
                         double(m - mode) * std::log1p(-p));
    const double odds = p / q;
    for (std::size_t k = mode; k < m; ++k)
        pmf[k + 1] = pmf[k] * (double(m - k) / double(k + 1)) * odds;
    for (std::size_t k = mode; k > 0; --k)
        pmf[k - 1] = pmf[k] * (double(k) / double(m - k + 1)) / odds;
    return pmf;
}

// tail[k] = P(S >= k) for k = 0..m+1, summed from the far end so the small
// tail entries are not swamped by the bulk.
inline std::vector<double> binomial_upper_tail(const std::vector<double>& pmf) {
    std::vector<double> tail(pmf.size() + 1, 0.0);
    for (std::size_t k = pmf.size(); k > 0; --k) tail[k - 1] = tail[k] + pmf[k - 1];
    return tail;
}

// Central moment E[(S - mp)^order] for S ~ Binomial(m, p), by convolving one
// centered Bernoulli at a time: E[S_i^k] = sum_j C(k,j) E[S_{i-1}^{k-j}] e_j
// with e_j = q(-p)^j + p q^j.  Exact in exact arithmetic; doubles are ample
// for the supported (order, m) range.
inline double binomial_central_moment(std::size_t m, double p, unsigned order) {
    if (!(p >= 0.0 && p <= 1.0)) throw domain_error("binomial_central_moment: p must lie in [0,1]");
    if (order > 8) throw domain_error("binomial_central_moment: order capped at 8");
    if (m > 1000000) throw domain_error("binomial_central_moment: m capped at 1e6");
    if (order == 0) return 1.0;
    const double q = 1.0 - p;
    std::vector<double> e(order + 1);  // moments of one centered Bernoulli
    for (unsigned j = 0; j <= order; ++j)
        e[j] = q * std::pow(-p, double(j)) + p * std::pow(q, double(j));
    std::vector<std::vector<double>> choose(order + 1, std::vector<double>(order + 1, 0.0));
    for (unsigned k = 0; k <= order; ++k) {
        choose[k][0] = 1.0;
        for (unsigned j = 1; j <= k; ++j)
            choose[k][j] = choose[k - 1][j - 1] + (j <= k - 1 ? choose[k - 1][j] : 0.0);
    }
    std::vector<double> mom(order + 1, 0.0), next(order + 1, 0.0);
    mom[0] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (unsigned k = 0; k <= order; ++k) {
            double acc = 0.0;
            for (unsigned j = 0; j <= k; ++j) acc += choose[k][j] * mom[k - j] * e[j];
            next[k] = acc;
        }
        mom.swap(next);
    }
    return mom[order];
}

namespace detail {

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double inc_beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) return h;
    }
    throw numeric_error("reg_inc_beta: continued fraction failed to converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw domain_error("reg_inc_beta: a, b must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("reg_inc_beta: x must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(log_front) * detail::inc_beta_cf(a, b, x) / a;
    return 1.0 - std::exp(log_front) * detail::inc_beta_cf(b, a, 1.0 - x) / b;
}

struct MomentCheck {
    double moment = 0.0;  // E[(S - mp)^(2 tau)]
    double bound = 0.0;   // max(mp, (mp)^tau)
    double ratio = 0.0;
};

// Even central moments of a binomial grow no faster than max(mp, (mp)^tau);
// the ratio is the constant the bound would need.
inline MomentCheck binomial_moment_check(std::size_t m, double p, unsigned tau) {
    if (m == 0) throw domain_error("binomial_moment_check: m must be positive");
    if (!(p > 0.0 && p <= 1.0)) throw domain_error("binomial_moment_check: p must be in (0,1]");
    if (tau < 1 || tau > 4) throw domain_error("binomial_moment_check: tau must lie in [1,4]");
    MomentCheck out;
    out.moment = binomial_central_moment(m, p, 2 * tau);
    const double mp = double(m) * p;
    out.bound = std::max(mp, std::pow(mp, double(tau)));
    out.ratio = out.moment / out.bound;
    return out;
}

}  // namespace qf
