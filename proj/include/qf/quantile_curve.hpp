#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "qf/errors.hpp"
#include "qf/mixture.hpp"

namespace qf {

// The alpha-quantile x = q(t) of the heat-evolved mixture, defined by
// cdf(q(t), t) = alpha, together with the quantities the limit kernel needs:
// the quantile's time derivative and the inverse density along the curve.
class QuantileCurve {
  public:
    QuantileCurve(HeatField field, double alpha, double cdf_tol = 1e-14)
        : field_(std::move(field)), alpha_(alpha), tol_(cdf_tol) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw domain_error("QuantileCurve: alpha must lie in (0,1)");
        if (!(cdf_tol > 0.0)) throw domain_error("QuantileCurve: tolerance must be positive");
    }

    double alpha() const { return alpha_; }
    const HeatField& field() const { return field_; }

    // Root of cdf(., t) = alpha: bracketing + bisection-safeguarded Newton.
    double quantile(double t) const {
        if (!(t >= 0.0)) throw domain_error("QuantileCurve::quantile: t must be >= 0");

        double mean_lo = 0.0, mean_hi = 0.0, sd_max = 0.0;
        bool first = true;
        for (const auto& c : field_.base().components()) {
            mean_lo = first ? c.mean : std::min(mean_lo, c.mean);
            mean_hi = first ? c.mean : std::max(mean_hi, c.mean);
            sd_max = std::max(sd_max, std::sqrt(c.std * c.std + t));
            first = false;
        }
        double lo = mean_lo - 10.0 * sd_max;
        double hi = mean_hi + 10.0 * sd_max;
        const double width = hi - lo;
        int expand = 0;
        while (field_.cdf(lo, t) > alpha_) {
            lo -= width * double(1u << std::min(expand, 20));
            if (++expand > 200)
                throw numeric_error("QuantileCurve::quantile: bracket expansion failed (lower)");
        }
        expand = 0;
        while (field_.cdf(hi, t) < alpha_) {
            hi += width * double(1u << std::min(expand, 20));
            if (++expand > 200)
                throw numeric_error("QuantileCurve::quantile: bracket expansion failed (upper)");
        }

        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double e = field_.cdf(x, t) - alpha_;
            if (std::fabs(e) <= tol_) return x;
            if (e > 0.0)
                hi = x;
            else
                lo = x;
            const double u = field_.density(x, t);
            double next = u > 0.0 ? x - e / u : x;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() *
                               std::max(1.0, std::fabs(x)))
                return next;  // interval collapsed to rounding noise
            x = next;
        }
        return x;
    }

    // dq/dt = -u_x(q(t), t) / (2 u(q(t), t)); the quantile curve solves this ODE.
    double ode_rhs(double t) const {
        if (!(t > 0.0)) throw domain_error("QuantileCurve::ode_rhs: t must be positive");
        const double q = quantile(t);
        const double u = field_.density(q, t);
        if (!(u > 0.0)) throw numeric_error("QuantileCurve::ode_rhs: density vanished at quantile");
        return -field_.density(q, t, 1) / (2.0 * u);
    }

    // theta(t) = 1 / u(q(t), t): the scale factor of the limit fluctuation.
    double theta(double t) const {
        const double u = field_.density(quantile(t), t);
        if (!(u > 0.0)) throw numeric_error("QuantileCurve::theta: density vanished at quantile");
        return 1.0 / u;
    }

  private:
    HeatField field_;
    double alpha_;
    double tol_;
};

}  // namespace qf
