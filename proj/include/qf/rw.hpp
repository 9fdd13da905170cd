#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qf/binomial.hpp"
#include "qf/errors.hpp"
#include "qf/normal.hpp"
#include "qf/parallel.hpp"
#include "qf/particles.hpp"
#include "qf/quadrature.hpp"
#include "qf/quantile_curve.hpp"
#include "qf/rng.hpp"
#include "qf/selection.hpp"
#include "qf/stats.hpp"

namespace qf {

// Comparison relating the count of marked lower particles to marked upper
// particles: lt/le bound the event "rank-j order statistic moved left",
// gt/ge its complement.
enum class Rel { lt, le, gt, ge };

struct RwParams {
    std::size_t rank = 1;  // 1-based order statistic j
    std::size_t n = 1;
    double r1 = 0.0;  // marking probability for the j-1 lower particles
    double r2 = 0.0;  // marking probability for the n-j upper particles
};

// P(L rel U) with L ~ Binomial(rank-1, r1) and U ~ Binomial(n-rank, r2)
// independent, evaluated by pairing the pmf of L with upper-tail sums of U.
inline double psi(const RwParams& p, Rel rel) {
    if (p.rank < 1 || p.rank > p.n) throw domain_error("psi: rank out of range");
    if (!(p.r1 >= 0.0 && p.r1 <= 1.0 && p.r2 >= 0.0 && p.r2 <= 1.0))
        throw domain_error("psi: marking probabilities must lie in [0,1]");
    const std::size_t nl = p.rank - 1, nu = p.n - p.rank;
    const std::vector<double> pmf_l = binomial_pmf(nl, p.r1);
    const std::vector<double> tail_u = binomial_upper_tail(binomial_pmf(nu, p.r2));
    const auto tail_at = [&](std::size_t k) {
        return k < tail_u.size() ? tail_u[k] : 0.0;
    };
    double le = 0.0, lt = 0.0;
    for (std::size_t k = 0; k <= nl; ++k) {
        le += pmf_l[k] * tail_at(k);
        lt += pmf_l[k] * tail_at(k + 1);
    }
    le = std::clamp(le, 0.0, 1.0);
    lt = std::clamp(lt, 0.0, 1.0);
    switch (rel) {
        case Rel::le: return le;
        case Rel::lt: return lt;
        case Rel::gt: return 1.0 - le;
        case Rel::ge: return 1.0 - lt;
    }
    throw domain_error("psi: bad relation");
}

struct SplitProbs {
    double q1 = 0.0;  // P(B(t) > q(t)+x+y | B(s) < q(s)+x)
    double q2 = 0.0;  // P(B(t) < q(t)+x+y | B(s) > q(s)+x)
};

// Crossing probabilities of one particle relative to the moving thresholds
// q(s)+x and q(t)+x+y, split by which side of q(s)+x it starts on.
inline SplitProbs split_probs(const QuantileCurve& curve, double s, double t, double x, double y) {
    if (!(s >= 0.0 && t > s)) throw domain_error("split_probs: need 0 <= s < t");
    const HeatField& field = curve.field();
    const double a = curve.quantile(s) + x;
    const double b = curve.quantile(t) + x + y;
    const double ps = field.cdf(a, s);
    const double joint = field.joint_cdf(s, t, a, b);
    if (ps <= 1e-300 || 1.0 - ps <= 1e-300)
        throw numeric_error("split_probs: conditioning event has vanishing probability");
    SplitProbs out;
    out.q1 = std::clamp((ps - joint) / ps, 0.0, 1.0);
    out.q2 = std::clamp((field.cdf(b, t) - joint) / (1.0 - ps), 0.0, 1.0);
    return out;
}

// One probe point of the order-statistic increment machinery: a time pair,
// the offset x of the order statistic from q(s), and the gap y being tested.
struct GapContext {
    QuantileCurve curve;
    double s = 0.0;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;

    GapContext(QuantileCurve c, double s_, double t_, double x_ = 0.0, double y_ = 0.0)
        : curve(std::move(c)), s(s_), t(t_), x(x_), y(y_) {
        if (!(s >= 0.0 && t > s)) throw domain_error("GapContext: need 0 <= s < t");
    }
};

inline SplitProbs split_probs(const GapContext& ctx) {
    return split_probs(ctx.curve, ctx.s, ctx.t, ctx.x, ctx.y);
}

// phi^rel(x,y) = psi^rel(q1(x,y), q2(x,y)) for the rank-j statistic of n
// particles: bounds on the conditional law of the order-statistic increment.
inline double phi_prob(const QuantileCurve& curve, std::size_t rank, std::size_t n, double s,
                       double t, double x, double y, Rel rel) {
    const SplitProbs q = split_probs(curve, s, t, x, y);
    return psi({rank, n, q.q1, q.q2}, rel);
}

struct MuSigma {
    double mu = 0.0;     // alpha r1 - (1-alpha) r2
    double sigma = 0.0;  // alpha r1 + (1-alpha) r2
};

inline MuSigma mu_sigma(double alpha, double r1, double r2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("mu_sigma: alpha must be in (0,1)");
    if (!(r1 >= 0.0 && r1 <= 1.0 && r2 >= 0.0 && r2 <= 1.0))
        throw domain_error("mu_sigma: probabilities must lie in [0,1]");
    return {alpha * r1 - (1.0 - alpha) * r2, alpha * r1 + (1.0 - alpha) * r2};
}

// psi^le is dominated by sigma^tau / (n mu^2)^tau whenever the drift mu is
// positive, up to a constant independent of r1, r2.  The ratio
// psi^le n^tau mu^(2 tau) / sigma^tau reports the constant the bound needs
// at one parameter point.
inline double rwest_ratio(const RwParams& p, double alpha, double tau) {
    if (!(tau > 1.0)) throw domain_error("rwest_ratio: tau must exceed 1");
    const MuSigma ms = mu_sigma(alpha, p.r1, p.r2);
    if (!(ms.mu > 0.0)) throw domain_error("rwest_ratio: drift mu must be positive");
    return psi(p, Rel::le) * std::pow(double(p.n), tau) * std::pow(ms.mu, 2.0 * tau) /
           std::pow(ms.sigma, tau);
}

struct RwestCheck {
    std::size_t rank = 0;
    double psi_le = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double bound = 0.0;  // sigma^tau / (n^tau mu^(2 tau)), constant omitted
    double ratio = 0.0;  // psi_le / bound: the constant the estimate needs
};

// rwest_ratio at the default rank ceil(alpha n), with the pieces broken out.
inline RwestCheck rwest_check(std::size_t n, double alpha, double r1, double r2, double tau) {
    if (n < 1) throw domain_error("rwest_check: n must be positive");
    const std::size_t rank = std::size_t(std::ceil(alpha * double(n)));
    const MuSigma ms = mu_sigma(alpha, r1, r2);
    RwestCheck out;
    out.rank = rank;
    out.mu = ms.mu;
    out.sigma = ms.sigma;
    out.psi_le = psi({rank, n, r1, r2}, Rel::le);
    out.ratio = rwest_ratio({rank, n, r1, r2}, alpha, tau);
    out.bound =
        std::pow(ms.sigma, tau) / (std::pow(double(n), tau) * std::pow(ms.mu, 2.0 * tau));
    return out;
}

struct SandwichResult {
    std::size_t rank = 0, n = 0, replicas = 0;
    double s = 0.0, t = 0.0, y = 0.0;
    double mean_indicator = 0.0;  // empirical P(increment < y)
    double mean_lower = 0.0;      // E[phi^lt at the realized order statistic]
    double mean_upper = 0.0;      // E[phi^le at the realized order statistic]
    double lower_margin = 0.0;    // mean(indicator - lower), should be >= 0
    double lower_se = 0.0;
    double upper_margin = 0.0;  // mean(upper - indicator), should be >= 0
    double upper_se = 0.0;
    bool pass = false;
};

// Monte Carlo check of the conditional bracket phi^lt <= P(increment < y | X)
// <= phi^le: replicas of the full ensemble, bounds evaluated at each realized
// order statistic, margins measured in paired standard errors.
inline SandwichResult sandwich_check(const QuantileCurve& curve, std::size_t rank, std::size_t n,
                                     double s, double t, double y, std::size_t replicas,
                                     std::uint64_t seed, unsigned threads = 1, double z = 3.0) {
    if (rank < 1 || rank > n) throw domain_error("sandwich_check: rank out of range");
    if (!(s >= 0.0 && t > s)) throw domain_error("sandwich_check: need 0 <= s < t");
    if (replicas < 2) throw domain_error("sandwich_check: need replicas >= 2");
    const MixtureDensity& mixture = curve.field().base();
    const HeatField& field = curve.field();
    const double qs = curve.quantile(s), qt = curve.quantile(t);
    const std::vector<double> sim_times{s, t};
    std::vector<double> d_lo(replicas), d_hi(replicas), ind(replicas);
    parallel_for(replicas, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(2 * n);
        for (std::size_t r = lo; r < hi; ++r) {
            const std::uint64_t rep_seed = split_seed(seed, r);
            for (std::size_t p = 0; p < n; ++p)
                detail::simulate_particle(mixture, sim_times,
                                          detail::particle_stream_seed(rep_seed, p), &scratch[p],
                                          n);
            const double xs = select_kth(&scratch[0], n, rank - 1);
            const double xt = select_kth(&scratch[n], n, rank - 1);
            const double x = xs - qs;
            const double inc = (xt - qt) - x;
            // split_probs inlined on the precomputed quantiles (hot loop)
            const double ps = field.cdf(xs, s);
            const double joint = field.joint_cdf(s, t, xs, qt + x + y);
            if (ps <= 1e-300 || 1.0 - ps <= 1e-300)
                throw numeric_error("sandwich_check: conditioning probability vanished");
            const double q1 = std::clamp((ps - joint) / ps, 0.0, 1.0);
            const double q2 =
                std::clamp((field.cdf(qt + x + y, t) - joint) / (1.0 - ps), 0.0, 1.0);
            const double lower = psi({rank, n, q1, q2}, Rel::lt);
            const double upper = psi({rank, n, q1, q2}, Rel::le);
            const double i = inc < y ? 1.0 : 0.0;
            ind[r] = i;
            d_lo[r] = i - lower;
            d_hi[r] = upper - i;
        }
    });
    SandwichResult out;
    out.rank = rank;
    out.n = n;
    out.replicas = replicas;
    out.s = s;
    out.t = t;
    out.y = y;
    out.mean_indicator = mean(ind);
    out.lower_margin = mean(d_lo);
    out.lower_se = standard_error_mean(d_lo);
    out.upper_margin = mean(d_hi);
    out.upper_se = standard_error_mean(d_hi);
    out.mean_lower = out.mean_indicator - out.lower_margin;
    out.mean_upper = out.mean_indicator + out.upper_margin;
    out.pass = out.lower_margin >= -z * out.lower_se && out.upper_margin >= -z * out.upper_se;
    return out;
}

struct TaylorCheck {
    double s = 0.0, delta = 0.0, x = 0.0, y = 0.0;
    double psi_value = 0.0;  // Psi(x,y) = P(B(t) > q(t)+x+y, B(s) < q(s)+x)
    double expansion = 0.0;  // Psi(0,0) - u y / 2 + u y^2 / (2 sqrt(2 pi delta))
    double remainder = 0.0;
    double bound = 0.0;  // (|x|+|y|)(sqrt(d)+|y|+y^2/sqrt(d)) + y^4/d^(3/2)
    double ratio = 0.0;  // |remainder| / bound, 0 at the origin
    double q1_remainder = 0.0;  // alpha q1 minus the same expansion
    double q2_remainder = 0.0;  // (1-alpha) q2 minus the sign-flipped expansion
};

// Second-order expansion of the no-crossing mass Psi around (x,y) = (0,0),
// with the remainder measured against its structural bound (constant
// omitted).  alpha q1 and (1-alpha) q2 share the expansion, the linear term
// flipping sign for q2.
inline TaylorCheck taylor_check(const QuantileCurve& curve, double s, double delta, double x,
                                double y) {
    if (!(s >= 0.0)) throw domain_error("taylor_check: s must be >= 0");
    if (!(delta > 0.0)) throw domain_error("taylor_check: delta must be positive");
    const HeatField& field = curve.field();
    const double t = s + delta;
    const double qs = curve.quantile(s), qt = curve.quantile(t);
    const double u = field.density(qs, s);
    const auto big_psi = [&](double xx, double yy) {
        return field.cdf(qs + xx, s) - field.joint_cdf(s, t, qs + xx, qt + xx + yy);
    };
    TaylorCheck out;
    out.s = s;
    out.delta = delta;
    out.x = x;
    out.y = y;
    out.psi_value = big_psi(x, y);
    const double psi0 = big_psi(0.0, 0.0);
    const double quad = u * y * y / (2.0 * std::sqrt(two_pi * delta));
    out.expansion = psi0 - 0.5 * u * y + quad;
    out.remainder = out.psi_value - out.expansion;
    const double ay = std::fabs(y), rd = std::sqrt(delta);
    out.bound = (std::fabs(x) + ay) * (rd + ay + ay * ay / rd) + ay * ay * ay * ay / (delta * rd);
    out.ratio = out.bound > 0.0 ? std::fabs(out.remainder) / out.bound : 0.0;
    const SplitProbs q = split_probs(curve, s, t, x, y);
    out.q1_remainder = curve.alpha() * q.q1 - out.expansion;
    out.q2_remainder = (1.0 - curve.alpha()) * q.q2 - (psi0 + 0.5 * u * y + quad);
    return out;
}

struct OrderStatCdf {
    double beta = 0.0;  // regularized incomplete beta I_u(j, n-j+1)
    double quad = 0.0;  // direct quadrature of the order-statistic density
};

// Both evaluation routes for P(U_{j:n} <= u) of uniform order statistics.
inline OrderStatCdf order_stat_cdf_routes(std::size_t j, std::size_t n, double u) {
    if (j < 1 || j > n) throw domain_error("order_stat_cdf: rank out of range");
    if (!(u >= 0.0 && u <= 1.0)) throw domain_error("order_stat_cdf: u must lie in [0,1]");
    if (u == 0.0 || u == 1.0) return {u, u};
    const double a = double(j), b = double(n - j + 1);
    const double beta = reg_inc_beta(a, b, u);
    const double log_coeff = std::lgamma(double(n) + 1.0) - std::lgamma(a) - std::lgamma(b);
    const auto density = [&](double v) {
        if (v <= 0.0) return j == 1 ? std::exp(log_coeff) : 0.0;
        if (v >= 1.0) return j == n ? std::exp(log_coeff) : 0.0;
        return std::exp(log_coeff + (a - 1.0) * std::log(v) + (b - 1.0) * std::log1p(-v));
    };
    return {beta, adaptive_simpson(density, 0.0, u, 1e-12)};
}

// P(U_{j:n} <= u), the two routes required to agree.
inline double order_stat_cdf(std::size_t j, std::size_t n, double u) {
    const OrderStatCdf r = order_stat_cdf_routes(j, n, u);
    if (std::fabs(r.beta - r.quad) > 1e-8)
        throw numeric_error("order_stat_cdf: beta and quadrature routes disagree");
    return r.beta;
}

inline TaylorCheck taylor_check(const GapContext& ctx) {
    return taylor_check(ctx.curve, ctx.s, ctx.t - ctx.s, ctx.x, ctx.y);
}

// Sandwich check at the default rank ceil(alpha n); the offset x is realized
// per replica, so only (s, t, y) of the context are used.
inline SandwichResult sandwich_check(const GapContext& ctx, std::size_t n, std::size_t replicas,
                                     std::uint64_t seed, unsigned threads = 1, double z = 3.0) {
    const std::size_t rank = std::size_t(std::ceil(ctx.curve.alpha() * double(n)));
    return sandwich_check(ctx.curve, rank, n, ctx.s, ctx.t, ctx.y, replicas, seed, threads, z);
}

}  // namespace qf
