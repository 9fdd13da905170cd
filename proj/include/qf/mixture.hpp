#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <utility>
#include <vector>

#include "qf/bivariate.hpp"
#include "qf/errors.hpp"
#include "qf/normal.hpp"

namespace qf {

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t nbytes,
                           std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < nbytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(double v, std::uint64_t h) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return fnv1a(&bits, sizeof bits, h);
}

}  // namespace detail

// Finite Gaussian mixture: the time-0 law of the particles.
class MixtureDensity {
  public:
    struct Component {
        double weight;
        double mean;
        double std;
    };

    explicit MixtureDensity(std::vector<Component> comps) : comps_(std::move(comps)) {
        if (comps_.empty()) throw domain_error("MixtureDensity: at least one component required");
        double sum = 0.0;
        for (const auto& c : comps_) {
            if (!(c.weight > 0.0)) throw domain_error("MixtureDensity: weights must be positive");
            if (!(c.std > 0.0)) throw domain_error("MixtureDensity: stds must be positive");
            if (!std::isfinite(c.mean)) throw domain_error("MixtureDensity: means must be finite");
            sum += c.weight;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
            throw domain_error("MixtureDensity: weights must sum to 1 within 1e-12");
    }

    static MixtureDensity standard_normal() { return MixtureDensity({{1.0, 0.0, 1.0}}); }

    const std::vector<Component>& components() const { return comps_; }
    std::size_t size() const { return comps_.size(); }

    // Stable hash of the parameters, used to fingerprint derived artifacts.
    std::uint64_t fingerprint() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto& c : comps_) {
            h = detail::fnv1a(c.weight, h);
            h = detail::fnv1a(c.mean, h);
            h = detail::fnv1a(c.std, h);
        }
        return h;
    }

  private:
    std::vector<Component> comps_;
};

// Gaussian transition kernel p_t(x,y) = exp(-(x-y)^2/(2t)) / sqrt(2 pi t), t > 0.
inline double transition_density(double t, double x, double y) {
    if (!(t > 0.0)) throw domain_error("transition_density: t must be positive");
    const double d = x - y;
    return std::exp(-0.5 * d * d / t) / std::sqrt(two_pi * t);
}

// d/dt of the transition kernel.
inline double transition_density_dt(double t, double x, double y) {
    if (!(t > 0.0)) throw domain_error("transition_density_dt: t must be positive");
    const double d = x - y;
    return transition_density(t, x, y) * (d * d / t - 1.0) / (2.0 * t);
}

// d/dy of the transition kernel.
inline double transition_density_dy(double t, double x, double y) {
    if (!(t > 0.0)) throw domain_error("transition_density_dy: t must be positive");
    return transition_density(t, x, y) * (x - y) / t;
}

// Heat evolution of a Gaussian mixture: u(.,t) is the mixture density
// mollified by Brownian noise of variance t, available in closed form
// together with its first four spatial derivatives and its CDF, plus the
// two-time joint distribution of a single particle.
class HeatField {
  public:
    explicit HeatField(MixtureDensity base) : base_(std::move(base)) {}

    const MixtureDensity& base() const { return base_; }

    // d^j/dx^j u(x,t), j <= 4.  Each component contributes
    // (-1)^j v^{-j/2} He_j(z) times its Gaussian density, v = std^2 + t.
    double density(double x, double t, int deriv = 0) const {
        if (!(t >= 0.0)) throw domain_error("HeatField::density: t must be >= 0");
        if (deriv < 0 || deriv > 4)
            throw domain_error("HeatField::density: derivative order must be in 0..4");
        double sum = 0.0;
        for (const auto& c : base_.components()) {
            const double sd = std::sqrt(c.std * c.std + t);
            const double z = (x - c.mean) / sd;
            double term = c.weight * norm_pdf(z) / sd;
            if (deriv > 0) {
                double scale = 1.0;
                for (int i = 0; i < deriv; ++i) scale *= -1.0 / sd;
                term *= scale * hermite_prob(deriv, z);
            }
            sum += term;
        }
        return sum;
    }

    // P(B(t) <= x) for a particle started from the base mixture.
    double cdf(double x, double t) const {
        if (!(t >= 0.0)) throw domain_error("HeatField::cdf: t must be >= 0");
        double sum = 0.0;
        for (const auto& c : base_.components())
            sum += c.weight * norm_cdf((x - c.mean) / std::sqrt(c.std * c.std + t));
        return sum;
    }

    // P(B(s) <= a, B(t) <= b).  Symmetric in the two space-time points; for
    // s <= t the per-component correlation is sqrt((std^2+s)/(std^2+t)), and
    // s = t collapses to the CDF at min(a,b) through the r = 1 branch.
    double joint_cdf(double s, double t, double a, double b) const {
        if (!(s >= 0.0 && t >= 0.0)) throw domain_error("HeatField::joint_cdf: times must be >= 0");
        if (s > t) return joint_cdf(t, s, b, a);
        double sum = 0.0;
        for (const auto& c : base_.components()) {
            const double vs = c.std * c.std + s;
            const double vt = c.std * c.std + t;
            sum += c.weight * phi2((a - c.mean) / std::sqrt(vs), (b - c.mean) / std::sqrt(vt),
                                   std::sqrt(vs / vt));
        }
        return sum;
    }

  private:
    MixtureDensity base_;
};

}  // namespace qf
