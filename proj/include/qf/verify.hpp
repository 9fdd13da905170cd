#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qf/binomial.hpp"
#include "qf/gp.hpp"
#include "qf/limit_kernel.hpp"
#include "qf/mixture.hpp"
#include "qf/particles.hpp"
#include "qf/quantile_curve.hpp"
#include "qf/rng.hpp"
#include "qf/rw.hpp"
#include "qf/selection.hpp"
#include "qf/stats.hpp"

namespace qf {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool ran = true;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool quick = false;  // skip the heavy Monte Carlo criteria (6, 8, 9, 10)
    unsigned threads = 1;
};

namespace acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class... Args>
inline std::string strf(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline MixtureDensity shifted_mixture() { return MixtureDensity({{1.0, 0.8, 1.0}}); }
inline MixtureDensity bimodal_mixture() {
    return MixtureDensity({{0.5, -1.0, 0.6}, {0.5, 1.0, 0.6}});
}

// --- pinned constants -------------------------------------------------------
// Tolerances come from the acceptance contract; brackets and seeds were
// calibrated once against the reference implementation and then frozen.
constexpr double c1_tol = 1e-8;
constexpr double c2_tol = 1e-10;
constexpr double c3_first_tol = 1e-7;   // first-order FD step 1e-5
constexpr double c3_mixed_tol = 1e-5;   // mixed FD step 2e-5
constexpr double c4_slope_tol = 0.02;   // slope target 0.5
constexpr double c4_ratio_lo = 2.30;    // msd / sqrt(gap) bracket
constexpr double c4_ratio_hi = 2.60;
constexpr double c5_ratio_lo = 0.20;    // |increment_cov| gap^1.5 / (ds dt) bracket;
constexpr double c5_ratio_hi = 0.40;    // small-step limit is sqrt(8)/8 ~ 0.354
constexpr double c6_rel_tol = 0.15;
constexpr std::uint64_t c6_seed = 1003;
constexpr double c7_r1 = -0.46007559225530506;  // sqrt(2) asin(1/sqrt(2)) - pi/2
constexpr double c7_r1_tol = 1e-8;
constexpr double c7_asym_tol = 1e-3;
constexpr double c8_cov_tol = 0.05;
constexpr double c8_kurt_tol = 0.15;
constexpr std::uint64_t c8_seed = 101;
constexpr double c9_tol = 0.07;
constexpr std::uint64_t c9_bridge_seed = 202;
constexpr std::uint64_t c9_field_seed = 303;
constexpr std::uint64_t c10_seed = 404;
constexpr double c12_factor = 10.0;
constexpr double c13_beta_tol = 1e-10;
constexpr double c13_moment_cap = 4.2;  // sup of the ratio sits near 4 at np ~ 1
constexpr double c13_heat_tol = 1e-8;
constexpr double c13_ode_tol = 1e-6;
constexpr std::uint64_t c13_beta_seed = 909;
constexpr double c14_psi_tol = 1e-12;
constexpr std::uint64_t c14_sel_seed = 707;

// 1. Exact closed form of rho for the standard normal start at alpha = 1/2.
inline Outcome gaussian_kernel_identity() {
    const LimitKernel kernel(QuantileCurve(HeatField(MixtureDensity::standard_normal()), 0.5));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double s = 3.0 * i / 19.0, t = 3.0 * j / 19.0;
            const double lo = 1.0 + std::min(s, t), hi = 1.0 + std::max(s, t);
            const double closed = std::sqrt(lo * hi) * std::asin(std::sqrt(lo / hi));
            worst = std::max(worst, std::fabs(kernel.rho(s, t) - closed));
        }
    }
    return {worst <= c1_tol, strf("max|rho-closed|=%.3g tol=%.0e", worst, c1_tol)};
}

// 2. rho(t,t) = (alpha - alpha^2) theta(t)^2 across three mixtures.
inline Outcome diagonal_identity() {
    const std::pair<MixtureDensity, double> cases[] = {
        {MixtureDensity::standard_normal(), 0.5},
        {shifted_mixture(), 0.35},
        {bimodal_mixture(), 0.6},
    };
    double worst = 0.0;
    for (const auto& [mix, alpha] : cases) {
        const QuantileCurve curve(HeatField(mix), alpha);
        const LimitKernel kernel(curve);
        for (double t : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            const double th = curve.theta(t);
            worst = std::max(worst,
                             std::fabs(kernel.rho(t, t) - (alpha - alpha * alpha) * th * th));
        }
    }
    return {worst <= c2_tol, strf("max|diag err|=%.3g tol=%.0e", worst, c2_tol)};
}

// 3. Closed-form kernel derivatives vs central finite differences of
// rho_tilde, plus the sign pattern for gaps up to 0.5.
inline Outcome derivative_formulas() {
    const LimitKernel kernel(QuantileCurve(HeatField(MixtureDensity::standard_normal()), 0.5));
    const double h1 = 1e-5, h2 = 2e-5;
    double worst1 = 0.0, worst2 = 0.0;
    int sign_bad = 0;
    for (double s : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        for (double gap : {0.03125, 0.0625, 0.125, 0.25, 0.5}) {
            const double t = s + gap;
            const double d1 = kernel.ds_rho_tilde(s, t);
            const double fd1 =
                (kernel.rho_tilde(s + h1, t) - kernel.rho_tilde(s - h1, t)) / (2.0 * h1);
            worst1 = std::max(worst1, std::fabs(d1 - fd1));
            const double d2 = kernel.dst_rho_tilde(s, t);
            const double fd2 = (kernel.rho_tilde(s + h2, t + h2) - kernel.rho_tilde(s + h2, t - h2) -
                                kernel.rho_tilde(s - h2, t + h2) + kernel.rho_tilde(s - h2, t - h2)) /
                               (4.0 * h2 * h2);
            worst2 = std::max(worst2, std::fabs(d2 - fd2));
            if (!(d1 > 0.0 && d2 < 0.0)) ++sign_bad;
        }
    }
    const bool pass = worst1 <= c3_first_tol && worst2 <= c3_mixed_tol && sign_bad == 0;
    return {pass, strf("fd1=%.3g (tol %.0e) fd2=%.3g (tol %.0e) sign_bad=%d", worst1,
                       c3_first_tol, worst2, c3_mixed_tol, sign_bad)};
}

// 4. Mean-square increments scale like sqrt(gap): log-log slope and a fixed
// bracket for msd/sqrt(gap) over dyadic gaps.
inline Outcome msd_scaling() {
    const LimitKernel kernel(QuantileCurve(HeatField(MixtureDensity::standard_normal()), 0.5));
    const double t0 = 0.5;
    std::vector<double> lg, lm;
    double rlo = 1e300, rhi = 0.0;
    for (int k = 6; k <= 14; ++k) {
        const double gap = std::ldexp(1.0, -k);
        const double m = kernel.msd(t0, t0 + gap);
        lg.push_back(std::log(gap));
        lm.push_back(std::log(m));
        const double ratio = m / std::sqrt(gap);
        rlo = std::min(rlo, ratio);
        rhi = std::max(rhi, ratio);
    }
    const double slope = least_squares(lg, lm).slope;
    const bool pass = std::fabs(slope - 0.5) <= c4_slope_tol && rlo >= c4_ratio_lo &&
                      rhi <= c4_ratio_hi;
    return {pass, strf("slope=%.4f (0.5±%.2g) ratio=[%.3f,%.3f] pin=[%.2f,%.2f]", slope,
                       c4_slope_tol, rlo, rhi, c4_ratio_lo, c4_ratio_hi)};
}

// 5. Nearby disjoint increments anticorrelate, with the scaled magnitude
// stable to a factor two across a dyadic (gap, step) sweep.
inline Outcome anti_persistence() {
    const LimitKernel kernel(QuantileCurve(HeatField(MixtureDensity::standard_normal()), 0.5));
    const double s = 1.0;
    int nonneg = 0;
    double rlo = 1e300, rhi = 0.0;
    for (int k = 3; k <= 10; ++k) {
        const double gap = std::ldexp(1.0, -k);
        for (int m = 2; m <= 9; ++m) {
            const double step = gap * std::ldexp(1.0, -m);
            const double cov = kernel.increment_cov(s, step, s + gap, step);
            if (!(cov < 0.0)) ++nonneg;
            const double ratio = -cov * gap * std::sqrt(gap) / (step * step);
            rlo = std::min(rlo, ratio);
            rhi = std::max(rhi, ratio);
        }
    }
    const bool pass = nonneg == 0 && rhi / rlo <= 2.0 && rlo >= c5_ratio_lo &&
                      rhi <= c5_ratio_hi;
    return {pass, strf("nonneg=%d ratio=[%.3f,%.3f] spread=%.2f pin=[%.2f,%.2f]", nonneg, rlo,
                       rhi, rhi / rlo, c5_ratio_lo, c5_ratio_hi)};
}

// 6. Quartic variation of sampled paths approaches its integral limit, with
// the discrepancy shrinking under grid refinement.  The replica budget grows
// with the refinement level so the Monte Carlo error of the replica mean
// halves at each step; the headline 15% tolerance is checked on the pinned
// 8-replica estimate at the finest grid.
inline Outcome quartic_variation_limit(unsigned threads, std::uint64_t seed = c6_seed) {
    const LimitKernel kernel(QuantileCurve(HeatField(MixtureDensity::standard_normal()), 0.5));
    const double limit = quartic_limit(kernel, 1.0);
    std::vector<double> discs;
    double final_rel = 0.0;
    for (std::size_t n : {std::size_t(512), std::size_t(1024), std::size_t(2048),
                          std::size_t(4096)}) {
        std::vector<double> grid(n + 1);
        for (std::size_t j = 0; j <= n; ++j) grid[j] = double(j) / double(n);
        const std::size_t reps = 40 * n / 512;
        const GpSample sample = sample_gp(kernel, grid, reps, seed, threads);
        double acc = 0.0;
        for (std::size_t r = 0; r < reps; ++r) acc += quartic_variation(sample, r, 1.0);
        discs.push_back(std::fabs(acc / double(reps) - limit));
        if (n == 4096) {
            double acc8 = 0.0;
            for (std::size_t r = 0; r < 8; ++r) acc8 += quartic_variation(sample, r, 1.0);
            final_rel = std::fabs(acc8 / 8.0 - limit) / limit;
        }
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < discs.size(); ++i)
        if (!(discs[i] < discs[i - 1])) decreasing = false;
    const bool pass = decreasing && final_rel <= c6_rel_tol;
    return {pass,
            strf("disc=%.3f/%.3f/%.3f/%.3f rel8=%.3f (tol %.2f) decreasing=%d", discs[0],
                 discs[1], discs[2], discs[3], final_rel, c6_rel_tol, int(decreasing))};
}

// 7. Long-memory coefficient: frozen value at n=1 and the -1/6 n^-2 tail.
inline Outcome long_memory_coefficient() {
    const double r1_err = std::fabs(long_memory_r(1) - c7_r1);
    const double asym = std::fabs(1e6 * long_memory_r(1000) + 1.0 / 6.0);
    const bool pass = r1_err <= c7_r1_tol && asym <= c7_asym_tol;
    return {pass, strf("|r(1)-ref|=%.3g tol=%.0e |n^2 r+1/6|=%.3g tol=%.0e", r1_err, c7_r1_tol,
                       asym, c7_asym_tol)};
}

// 8. Finite-dimensional covariance of the simulated fluctuations matches the
// kernel, and marginals look Gaussian.
inline Outcome fdd_convergence(unsigned threads) {
    EnsembleConfig cfg;
    cfg.mixture = MixtureDensity::standard_normal();
    cfg.alpha = 0.5;
    cfg.n = 10000;
    cfg.replicas = 10000;
    cfg.times = {0.0, 0.5, 1.0};
    cfg.seed = c8_seed;
    cfg.threads = threads;
    const LimitKernel kernel(QuantileCurve(HeatField(cfg.mixture), cfg.alpha));
    const FddReport rep = fdd_covariance_check(simulate_ensemble(cfg), kernel);
    const bool pass = rep.max_rel_err <= c8_cov_tol && rep.max_abs_kurtosis <= c8_kurt_tol;
    return {pass, strf("max_rel_err=%.4f (tol %.2f) max|kurt|=%.4f (tol %.2f)", rep.max_rel_err,
                       c8_cov_tol, rep.max_abs_kurtosis, c8_kurt_tol)};
}

// 9. At a fixed time the density-rescaled fluctuations reproduce the bridge
// covariance across levels, and the empirical CDF field reproduces the
// two-point joint-probability covariance.
inline Outcome bridge_and_field(unsigned threads) {
    EnsembleConfig cfg;
    cfg.mixture = MixtureDensity::standard_normal();
    cfg.alpha = 0.5;
    cfg.n = 10000;
    cfg.replicas = 10000;
    cfg.times = {1.0};
    cfg.threads = threads;
    cfg.seed = c9_bridge_seed;
    const BridgeReport bridge = fixed_time_bridge_check(cfg, 1.0, {0.25, 0.75});
    cfg.seed = c9_field_seed;
    const FieldCovReport var_pt = empirical_field_cov(cfg, 1.0, 0.0, 1.0, 0.0);
    const FieldCovReport cov_pt = empirical_field_cov(cfg, 0.0, 0.0, 1.0, 0.0);
    const double worst =
        std::max({bridge.max_rel_err, var_pt.max_rel_err, cov_pt.max_rel_err});
    return {worst <= c9_tol, strf("bridge=%.4f field_var=%.4f field_cov=%.4f (tol %.2f)",
                                  bridge.max_rel_err, var_pt.max_rel_err, cov_pt.max_rel_err,
                                  c9_tol)};
}

// 10. Sandwich bounds on the conditional law of the order-statistic
// increment hold within three paired standard errors on a 3x3 grid.
inline Outcome sandwich_grid(unsigned threads) {
    const QuantileCurve curve(HeatField(MixtureDensity::standard_normal()), 0.5);
    const double s = 0.5;
    const std::pair<double, double> gaps[] = {
        {0.2, -0.1118033988749895}, {0.05, -0.05590169943749474}, {0.01, -0.025}};
    int cell = 0, failed = 0;
    double worst_z = 1e300;
    for (std::size_t n : {std::size_t(50), std::size_t(200), std::size_t(1000)}) {
        for (const auto& [gap, y] : gaps) {
            const std::size_t rank = std::size_t(std::ceil(0.5 * double(n)));
            const SandwichResult r = sandwich_check(curve, rank, n, s, s + gap, y, 100000,
                                                    c10_seed + cell, threads);
            if (!r.pass) ++failed;
            if (r.lower_se > 0.0) worst_z = std::min(worst_z, r.lower_margin / r.lower_se);
            if (r.upper_se > 0.0) worst_z = std::min(worst_z, r.upper_margin / r.upper_se);
            ++cell;
        }
    }
    return {failed == 0,
            strf("cells=9 failed=%d worst margin=%.2f paired-SE (need > -3)", failed, worst_z)};
}

// 11. The random-walk tail-bound ratio stays bounded in n for each preset.
inline Outcome rwest_boundedness() {
    const std::pair<double, double> presets[] = {
        {0.2, 0.1}, {0.3, 0.1}, {0.4, 0.2}, {0.1, 0.02}, {0.8, 0.5}};
    double worst_growth = 0.0;
    bool all_finite = true;
    for (const auto& [r1, r2] : presets) {
        double base = 0.0, peak = 0.0;
        for (std::size_t n : {std::size_t(100), std::size_t(1000), std::size_t(10000)}) {
            const RwestCheck c = rwest_check(n, 0.5, r1, r2, 2.0);
            if (!std::isfinite(c.ratio)) all_finite = false;
            if (n == 100) base = c.ratio;
            peak = std::max(peak, c.ratio);
        }
        worst_growth = std::max(worst_growth, peak / base);
    }
    const bool pass = all_finite && worst_growth <= 2.0;
    return {pass, strf("max ratio growth over n=%.3f (cap 2) finite=%d", worst_growth,
                       int(all_finite))};
}

// 12. Taylor remainders of the crossing mass stay within ten times the
// structural bound, and vanish exactly at the origin.
inline Outcome taylor_remainder() {
    const QuantileCurve curve(HeatField(MixtureDensity::standard_normal()), 0.5);
    const double s = 0.5;
    struct Pt {
        double delta, x, y;
    };
    std::vector<Pt> pts;
    for (double delta : {0.1, 0.01, 0.001}) {
        const double y = std::pow(delta, 0.6);
        pts.push_back({delta, 0.0, y});
        pts.push_back({delta, 0.0, -y});
    }
    pts.push_back({0.01, 0.0, 1e-3});
    pts.push_back({0.01, 0.05, std::pow(0.01, 0.6)});
    double worst = 0.0;
    for (const Pt& p : pts) {
        const TaylorCheck tc = taylor_check(curve, s, p.delta, p.x, p.y);
        const double r = std::max({std::fabs(tc.remainder), std::fabs(tc.q1_remainder),
                                   std::fabs(tc.q2_remainder)}) /
                         tc.bound;
        worst = std::max(worst, r);
    }
    const TaylorCheck origin = taylor_check(curve, s, 0.01, 0.0, 0.0);
    const bool origin_ok = origin.remainder == 0.0 && std::fabs(origin.q1_remainder) <= 1e-12 &&
                           std::fabs(origin.q2_remainder) <= 1e-12;
    const bool pass = worst <= c12_factor && origin_ok;
    return {pass, strf("max remainder/bound=%.3f (cap %.0f) origin_exact=%d", worst, c12_factor,
                       int(origin_ok))};
}

// 13. Appendix-level identities: order-statistic beta CDF routes, binomial
// central-moment growth, heat-equation residual, quantile ODE residual.
inline Outcome residual_identities() {
    RandomStream rng(c13_beta_seed);
    double worst_beta = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 1 + rng.next_u64() % 50;
        const std::size_t j = 1 + rng.next_u64() % n;
        const OrderStatCdf r = order_stat_cdf_routes(j, n, rng.uniform());
        worst_beta = std::max(worst_beta, std::fabs(r.beta - r.quad));
    }

    double worst_moment = 0.0;
    for (std::size_t n : {std::size_t(10), std::size_t(100), std::size_t(1000),
                          std::size_t(10000)})
        for (double p : {1e-3, 0.01, 0.1, 0.3, 0.5})
            for (unsigned r : {1u, 2u})
                worst_moment = std::max(worst_moment, binomial_moment_check(n, p, r).ratio);

    const MixtureDensity mixes[] = {MixtureDensity::standard_normal(), shifted_mixture(),
                                    bimodal_mixture()};
    double worst_heat = 0.0;
    const double h = 5e-3;
    for (const auto& mix : mixes) {
        const HeatField field(mix);
        for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            for (double t : {0.3, 0.5, 1.0, 2.0}) {
                const double dt_u = (-field.density(x, t + 2 * h) + 8 * field.density(x, t + h) -
                                     8 * field.density(x, t - h) + field.density(x, t - 2 * h)) /
                                    (12 * h);
                worst_heat =
                    std::max(worst_heat, std::fabs(dt_u - 0.5 * field.density(x, t, 2)));
            }
        }
    }

    const double alphas[] = {0.5, 0.35, 0.6};
    double worst_ode = 0.0;
    const double hq = 1e-4;
    for (int i = 0; i < 3; ++i) {
        const QuantileCurve curve(HeatField(mixes[i]), alphas[i]);
        for (double t : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0}) {
            const double fd = (curve.quantile(t + hq) - curve.quantile(t - hq)) / (2 * hq);
            worst_ode = std::max(worst_ode, std::fabs(fd - curve.ode_rhs(t)));
        }
    }

    const bool pass = worst_beta <= c13_beta_tol && worst_moment <= c13_moment_cap &&
                      worst_heat <= c13_heat_tol && worst_ode <= c13_ode_tol;
    return {pass, strf("beta=%.2g moment=%.2f heat=%.2g ode=%.2g (tols %.0e/%.1f/%.0e/%.0e)",
                       worst_beta, worst_moment, worst_heat, worst_ode, c13_beta_tol,
                       c13_moment_cap, c13_heat_tol, c13_ode_tol)};
}

// 14. Brute force: psi vs bitmask enumeration for n <= 8, and quickselect vs
// full sort.
inline Outcome brute_force_equivalences() {
    double worst_psi = 0.0;
    const double probs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t nl = j - 1, nu = n - j;
            for (double r1 : probs) {
                for (double r2 : probs) {
                    double e_le = 0.0, e_lt = 0.0;
                    for (std::uint64_t ml = 0; ml < (1ull << nl); ++ml) {
                        double pl = 1.0;
                        for (std::size_t b = 0; b < nl; ++b)
                            pl *= (ml >> b) & 1 ? r1 : 1.0 - r1;
                        const int l = __builtin_popcountll(ml);
                        for (std::uint64_t mu = 0; mu < (1ull << nu); ++mu) {
                            double pu = 1.0;
                            for (std::size_t b = 0; b < nu; ++b)
                                pu *= (mu >> b) & 1 ? r2 : 1.0 - r2;
                            const int u = __builtin_popcountll(mu);
                            if (l <= u) e_le += pl * pu;
                            if (l < u) e_lt += pl * pu;
                        }
                    }
                    const RwParams p{j, n, r1, r2};
                    worst_psi = std::max({worst_psi, std::fabs(psi(p, Rel::le) - e_le),
                                          std::fabs(psi(p, Rel::lt) - e_lt),
                                          std::fabs(psi(p, Rel::gt) - (1.0 - e_le)),
                                          std::fabs(psi(p, Rel::ge) - (1.0 - e_lt))});
                }
            }
        }
    }

    RandomStream rng(c14_sel_seed);
    int sel_bad = 0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n = 1 + rng.next_u64() % 200;
        std::vector<double> v(n);
        const bool ties = inst % 2 == 0;
        for (auto& x : v) x = ties ? double(rng.next_u64() % 8) : rng.uniform();
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t k = rng.next_u64() % n;
        std::vector<double> work = v;
        if (select_kth(work.data(), n, k) != sorted[k]) ++sel_bad;
        if (n >= 4) {
            const std::size_t ks[3] = {n / 4, n / 2, (3 * n) / 4};
            double out[3];
            work = v;
            select_many(work.data(), n, ks, out, 3);
            for (int i = 0; i < 3; ++i)
                if (out[i] != sorted[ks[i]]) ++sel_bad;
        }
    }
    const bool pass = worst_psi <= c14_psi_tol && sel_bad == 0;
    return {pass,
            strf("psi max err=%.2g (tol %.0e) selection mismatches=%d", worst_psi, c14_psi_tol,
                 sel_bad)};
}

}  // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
    using clock = std::chrono::steady_clock;
    std::vector<CriterionResult> out;
    const auto run = [&](int id, const char* name, bool heavy, auto&& fn) {
        CriterionResult r;
        r.id = id;
        r.name = name;
        if (opt.quick && heavy) {
            r.ran = false;
            r.pass = true;
            r.detail = "skipped (quick mode)";
            out.push_back(r);
            return;
        }
        const auto t0 = clock::now();
        try {
            const acceptance::Outcome o = fn();
            r.pass = o.pass;
            r.detail = o.detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        out.push_back(r);
    };

    run(1, "gaussian closed-form kernel identity", false,
        [] { return acceptance::gaussian_kernel_identity(); });
    run(2, "diagonal variance identity", false, [] { return acceptance::diagonal_identity(); });
    run(3, "kernel derivative closed forms", false,
        [] { return acceptance::derivative_formulas(); });
    run(4, "mean-square increment scaling", false, [] { return acceptance::msd_scaling(); });
    run(5, "anti-persistent increments", false, [] { return acceptance::anti_persistence(); });
    run(6, "quartic variation limit", true,
        [&] { return acceptance::quartic_variation_limit(opt.threads); });
    run(7, "long-memory coefficient", false,
        [] { return acceptance::long_memory_coefficient(); });
    run(8, "finite-dimensional covariance convergence", true,
        [&] { return acceptance::fdd_convergence(opt.threads); });
    run(9, "bridge slice and field covariance", true,
        [&] { return acceptance::bridge_and_field(opt.threads); });
    run(10, "order-statistic sandwich bounds", true,
        [&] { return acceptance::sandwich_grid(opt.threads); });
    run(11, "random-walk tail-bound ratio", false,
        [] { return acceptance::rwest_boundedness(); });
    run(12, "crossing-mass Taylor remainder", false,
        [] { return acceptance::taylor_remainder(); });
    run(13, "beta, moment, and residual identities", false,
        [] { return acceptance::residual_identities(); });
    run(14, "brute-force equivalences", false,
        [] { return acceptance::brute_force_equivalences(); });
    return out;
}

inline std::string format_criterion(const CriterionResult& r) {
    return acceptance::strf("[%s] %2d %-40s %s (%.2fs)",
                            r.ran ? (r.pass ? "PASS" : "FAIL") : "SKIP", r.id, r.name.c_str(),
                            r.detail.c_str(), r.seconds);
}

inline bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (r.ran && !r.pass) return false;
    return true;
}

}  // namespace qf
