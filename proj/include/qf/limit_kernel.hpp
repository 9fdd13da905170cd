#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qf/errors.hpp"
#include "qf/mixture.hpp"
#include "qf/parallel.hpp"
#include "qf/quantile_curve.hpp"

namespace qf {

// Covariance structure of the limiting quantile fluctuation process.
//
//   rho_tilde(s,t) = P(B(s) <= q(s), B(t) <= q(t)) - alpha^2
//   rho(s,t)       = rho_tilde(s,t) * theta(s) * theta(t)
//
// plus the exact gap derivatives of rho_tilde and the induced increment
// statistics.  All evaluations are pure; the Gram assembly precomputes the
// quantile curve once per grid point and may fan rows out across workers.
class LimitKernel {
  public:
    explicit LimitKernel(QuantileCurve curve) : curve_(std::move(curve)) {}

    const QuantileCurve& curve() const { return curve_; }

    double rho_tilde(double s, double t) const {
        if (!(s >= 0.0 && t >= 0.0)) throw domain_error("LimitKernel::rho_tilde: times must be >= 0");
        const double a = curve_.alpha();
        return curve_.field().joint_cdf(s, t, curve_.quantile(s), curve_.quantile(t)) - a * a;
    }

    double rho(double s, double t) const {
        return rho_tilde(s, t) * curve_.theta(s) * curve_.theta(t);
    }

    // d/ds rho_tilde(s,t) = (1/2) p_{t-s}(q(s), q(t)) u(q(s), s), 0 <= s < t.
    double ds_rho_tilde(double s, double t) const {
        require_gap(s, t, "ds_rho_tilde");
        const double qs = curve_.quantile(s), qt = curve_.quantile(t);
        return 0.5 * transition_density(t - s, qs, qt) * curve_.field().density(qs, s);
    }

    // d^2/(ds dt) rho_tilde(s,t), 0 <= s < t: differentiates the gap kernel in
    // t directly and routes the moving-endpoint term through dq/dt.
    double dst_rho_tilde(double s, double t) const {
        require_gap(s, t, "dst_rho_tilde");
        const double qs = curve_.quantile(s), qt = curve_.quantile(t);
        const double us = curve_.field().density(qs, s);
        const double gap = t - s;
        return 0.5 * us * (transition_density_dt(gap, qs, qt) +
                           transition_density_dy(gap, qs, qt) * curve_.ode_rhs(t));
    }

    // E |F(t) - F(s)|^2 under the limit law.
    double msd(double s, double t) const { return rho(s, s) + rho(t, t) - 2.0 * rho(s, t); }

    // E [ (F(s) - F(s-ds)) (F(t+dt) - F(t)) ] for disjoint increments,
    // 0 <= s-ds < s < t < t+dt.
    double increment_cov(double s, double ds, double t, double dt) const {
        if (!(ds > 0.0 && dt > 0.0))
            throw domain_error("LimitKernel::increment_cov: increments must be positive");
        if (!(s - ds >= 0.0 && s < t))
            throw domain_error("LimitKernel::increment_cov: need 0 <= s-ds < s < t < t+dt");
        return rho(s, t + dt) - rho(s, t) - rho(s - ds, t + dt) + rho(s - ds, t);
    }

    // Row-major rho(times[i], times[j]) matrix.  Quantiles and thetas are
    // precomputed per grid point; rows are independent and may be parallel.
    std::vector<double> gram(const std::vector<double>& times, unsigned threads = 1) const {
        const std::size_t n = times.size();
        std::vector<double> q(n), th(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(times[i] >= 0.0)) throw domain_error("LimitKernel::gram: times must be >= 0");
            q[i] = curve_.quantile(times[i]);
            th[i] = curve_.theta(times[i]);
        }
        const double a = curve_.alpha();
        std::vector<double> g(n * n);
        const HeatField& field = curve_.field();
        parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const double rt =
                        field.joint_cdf(times[j], times[i], q[j], q[i]) - a * a;
                    g[i * n + j] = rt * th[i] * th[j];
                }
            }
        });
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) g[i * n + j] = g[j * n + i];
        return g;
    }

  private:
    static void require_gap(double s, double t, const char* who) {
        if (!(s >= 0.0 && s < t))
            throw domain_error(std::string("LimitKernel::") + who + ": need 0 <= s < t");
    }

    QuantileCurve curve_;
};

// Covariance sqrt(s t) * asin((s ^ t) / sqrt(s t)) of the limiting median
// process of Brownian motions started from a point; s, t > 0.
inline double medcov(double s, double t) {
    if (!(s > 0.0 && t > 0.0)) throw domain_error("medcov: times must be positive");
    return std::sqrt(s * t) * std::asin(std::min(s, t) / std::sqrt(s * t));
}

// Lag-n autocovariance r(n) of the unit-lag increments of that median
// process: r(n) = g(n+1) - g(n) with g(m) = sqrt(m) asin(1/sqrt(m)).
// Negative for every n >= 1 and ~ -(1/6) n^{-2} at large lag.
inline double long_memory_r(std::uint64_t n) {
    if (n < 1) throw domain_error("long_memory_r: lag must be >= 1");
    const auto g = [](double m) { return std::sqrt(m) * std::asin(1.0 / std::sqrt(m)); };
    return g(double(n) + 1.0) - g(double(n));
}

}  // namespace qf
