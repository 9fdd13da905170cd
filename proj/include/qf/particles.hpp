#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qf/errors.hpp"
#include "qf/limit_kernel.hpp"
#include "qf/mixture.hpp"
#include "qf/parallel.hpp"
#include "qf/quantile_curve.hpp"
#include "qf/rng.hpp"
#include "qf/selection.hpp"
#include "qf/stats.hpp"

namespace qf {

struct EnsembleConfig {
    MixtureDensity mixture = MixtureDensity::standard_normal();
    double alpha = 0.5;
    std::size_t n = 0;          // particles per replica
    std::size_t replicas = 0;
    std::vector<double> times;  // nondecreasing, >= 0; duplicates allowed
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::size_t rank = 0;              // 1-based order statistic; 0 = ceil(alpha n)
    std::size_t memory_budget = std::size_t{1} << 27;  // max scratch doubles (n x #times)
};

// Centered, sqrt(n)-scaled order-statistic fluctuations, one row per replica.
struct FluctuationSample {
    std::vector<double> times;
    std::size_t n = 0;
    std::size_t rank = 0;  // 1-based
    double alpha = 0.5;
    std::uint64_t seed = 0;
    std::size_t replicas = 0;
    std::vector<double> qs;      // q(t) per requested time
    std::vector<double> values;  // replicas x times.size(), row-major

    double value(std::size_t r, std::size_t k) const { return values[r * times.size() + k]; }
    std::vector<double> column(std::size_t k) const {
        std::vector<double> col(replicas);
        for (std::size_t r = 0; r < replicas; ++r) col[r] = value(r, k);
        return col;
    }
};

namespace detail {

inline std::size_t default_rank(double alpha, std::size_t n) {
    return std::size_t(std::ceil(alpha * double(n)));
}

// Seed of the stream driving one particle of one replica.
inline std::uint64_t particle_stream_seed(std::uint64_t replica_seed, std::uint64_t particle) {
    return split_seed(replica_seed, particle);
}

// One particle's positions at the (unique, increasing) requested times.
// Consumption per particle is fixed: one uniform for the component pick, one
// normal for the initial position, one normal per strictly positive gap.
inline void simulate_particle(const MixtureDensity& mixture, const std::vector<double>& times,
                              std::uint64_t stream_seed, double* out, std::size_t stride) {
    RandomStream stream(stream_seed);
    const double pick = stream.uniform();
    double acc = 0.0;
    const auto& comps = mixture.components();
    std::size_t c = comps.size() - 1;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        acc += comps[i].weight;
        if (pick < acc) {
            c = i;
            break;
        }
    }
    double x = comps[c].mean + comps[c].std * stream.normal();
    double prev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] > prev) {
            x += std::sqrt(times[k] - prev) * stream.normal();
            prev = times[k];
        }
        out[k * stride] = x;
    }
}

}  // namespace detail

// Simulates the colliding ensemble and extracts the rank-th order statistic
// at every requested time: values are F_n(t) = sqrt(n) (Q_n(t) - q(t)).
// Duplicate requested times share one simulated column, so their outputs are
// equal by construction.  Scratch is per worker; each replica owns its output
// row, making results independent of the worker count.
inline FluctuationSample simulate_ensemble(const EnsembleConfig& cfg) {
    if (cfg.n == 0) throw domain_error("simulate_ensemble: need at least one particle");
    if (cfg.replicas == 0) throw domain_error("simulate_ensemble: need at least one replica");
    if (cfg.times.empty()) throw domain_error("simulate_ensemble: no times requested");
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        if (!(cfg.times[k] >= 0.0)) throw domain_error("simulate_ensemble: times must be >= 0");
        if (k > 0 && cfg.times[k] < cfg.times[k - 1])
            throw domain_error("simulate_ensemble: times must be nondecreasing");
    }
    const std::size_t rank = cfg.rank ? cfg.rank : detail::default_rank(cfg.alpha, cfg.n);
    if (rank < 1 || rank > cfg.n) throw domain_error("simulate_ensemble: rank out of range");

    std::vector<double> unique_times;
    std::vector<std::size_t> column_of(cfg.times.size());
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
        if (unique_times.empty() || cfg.times[k] > unique_times.back())
            unique_times.push_back(cfg.times[k]);
        column_of[k] = unique_times.size() - 1;
    }
    const std::size_t tcols = unique_times.size();
    if (cfg.n * tcols > cfg.memory_budget)
        throw config_error("simulate_ensemble: n x times exceeds the scratch memory budget");

    QuantileCurve curve(HeatField(cfg.mixture), cfg.alpha);
    std::vector<double> q_unique(tcols);
    for (std::size_t k = 0; k < tcols; ++k) q_unique[k] = curve.quantile(unique_times[k]);

    FluctuationSample out;
    out.times = cfg.times;
    out.n = cfg.n;
    out.rank = rank;
    out.alpha = cfg.alpha;
    out.seed = cfg.seed;
    out.replicas = cfg.replicas;
    out.qs.resize(cfg.times.size());
    for (std::size_t k = 0; k < cfg.times.size(); ++k) out.qs[k] = q_unique[column_of[k]];
    out.values.assign(cfg.replicas * cfg.times.size(), 0.0);

    const double scale = std::sqrt(double(cfg.n));
    parallel_for(cfg.replicas, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(cfg.n * tcols);  // column-major: one column per time
        for (std::size_t r = lo; r < hi; ++r) {
            const std::uint64_t rep_seed = split_seed(cfg.seed, r);
            for (std::size_t p = 0; p < cfg.n; ++p)
                detail::simulate_particle(cfg.mixture, unique_times,
                                          detail::particle_stream_seed(rep_seed, p),
                                          &scratch[p], cfg.n);
            for (std::size_t k = 0; k < tcols; ++k) {
                const double order_stat = select_kth(&scratch[k * cfg.n], cfg.n, rank - 1);
                for (std::size_t c = 0; c < cfg.times.size(); ++c)
                    if (column_of[c] == k)
                        out.values[r * cfg.times.size() + c] =
                            scale * (order_stat - q_unique[k]);
            }
        }
    });
    return out;
}

struct FddReport {
    std::vector<double> times;
    std::vector<double> emp_cov;     // T x T row-major
    std::vector<double> kernel_cov;  // T x T row-major
    std::vector<double> rel_err;     // entrywise |emp - kernel| / |kernel|
    std::vector<double> kurtosis;    // excess kurtosis per marginal
    double max_rel_err = 0.0;
    double max_abs_kurtosis = 0.0;
};

// Empirical finite-dimensional covariance of the fluctuations against rho.
inline FddReport fdd_covariance_check(const FluctuationSample& sample, const LimitKernel& kernel) {
    const std::size_t tn = sample.times.size();
    if (sample.replicas < 2) throw domain_error("fdd_covariance_check: need replicas >= 2");
    FddReport rep;
    rep.times = sample.times;
    rep.emp_cov.resize(tn * tn);
    rep.kernel_cov.resize(tn * tn);
    rep.rel_err.resize(tn * tn);
    std::vector<std::vector<double>> cols(tn);
    for (std::size_t k = 0; k < tn; ++k) cols[k] = sample.column(k);
    for (std::size_t i = 0; i < tn; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double emp = covariance(cols[i], cols[j]);
            const double ker = kernel.rho(sample.times[i], sample.times[j]);
            const double err = std::fabs(emp - ker) / std::fabs(ker);
            rep.emp_cov[i * tn + j] = rep.emp_cov[j * tn + i] = emp;
            rep.kernel_cov[i * tn + j] = rep.kernel_cov[j * tn + i] = ker;
            rep.rel_err[i * tn + j] = rep.rel_err[j * tn + i] = err;
            rep.max_rel_err = std::max(rep.max_rel_err, err);
        }
        rep.kurtosis.push_back(excess_kurtosis(cols[i]));
        rep.max_abs_kurtosis = std::max(rep.max_abs_kurtosis, std::fabs(rep.kurtosis.back()));
    }
    return rep;
}

struct BridgeReport {
    double t = 0.0;
    std::vector<double> levels;
    std::vector<double> emp_cov;    // m x m of the density-scaled fluctuations
    std::vector<double> exact_cov;  // a_i ^ a_j - a_i a_j
    std::vector<double> rel_err;
    double max_rel_err = 0.0;
};

// At one fixed time, the density-rescaled order-statistic fluctuations across
// several levels reproduce the Brownian-bridge covariance a^b - ab.  Runs its
// own ensemble: one simulated column, several ranks per replica.
inline BridgeReport fixed_time_bridge_check(const EnsembleConfig& cfg, double t,
                                            const std::vector<double>& levels) {
    if (!(t >= 0.0)) throw domain_error("fixed_time_bridge_check: t must be >= 0");
    if (levels.size() < 2) throw domain_error("fixed_time_bridge_check: need >= 2 levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] < 1.0))
            throw domain_error("fixed_time_bridge_check: levels must lie in (0,1)");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw domain_error("fixed_time_bridge_check: levels must be strictly increasing");
    }
    if (cfg.n == 0 || cfg.replicas == 0)
        throw domain_error("fixed_time_bridge_check: empty ensemble");

    const std::size_t m = levels.size();
    const HeatField field(cfg.mixture);
    std::vector<std::size_t> ranks(m);
    std::vector<double> qs(m), dens(m);
    for (std::size_t i = 0; i < m; ++i) {
        ranks[i] = detail::default_rank(levels[i], cfg.n) - 1;  // 0-based
        QuantileCurve curve(field, levels[i]);
        qs[i] = curve.quantile(t);
        dens[i] = field.density(qs[i], t);
        if (i > 0 && ranks[i] <= ranks[i - 1])
            throw domain_error("fixed_time_bridge_check: levels collapse onto equal ranks");
    }

    const double scale = std::sqrt(double(cfg.n));
    std::vector<double> scaled(cfg.replicas * m);
    const std::vector<double> sim_times{t};
    parallel_for(cfg.replicas, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(cfg.n), stats(m);
        for (std::size_t r = lo; r < hi; ++r) {
            const std::uint64_t rep_seed = split_seed(cfg.seed, r);
            for (std::size_t p = 0; p < cfg.n; ++p)
                detail::simulate_particle(cfg.mixture, sim_times,
                                          detail::particle_stream_seed(rep_seed, p),
                                          &scratch[p], 1);
            select_many(scratch.data(), cfg.n, ranks.data(), stats.data(), m);
            for (std::size_t i = 0; i < m; ++i)
                scaled[r * m + i] = dens[i] * scale * (stats[i] - qs[i]);
        }
    });

    BridgeReport rep;
    rep.t = t;
    rep.levels = levels;
    rep.emp_cov.resize(m * m);
    rep.exact_cov.resize(m * m);
    rep.rel_err.resize(m * m);
    std::vector<std::vector<double>> cols(m, std::vector<double>(cfg.replicas));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t r = 0; r < cfg.replicas; ++r) cols[i][r] = scaled[r * m + i];
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double emp = covariance(cols[i], cols[j]);
            const double exact = std::min(levels[i], levels[j]) - levels[i] * levels[j];
            const double err = std::fabs(emp - exact) / exact;
            rep.emp_cov[i * m + j] = rep.emp_cov[j * m + i] = emp;
            rep.exact_cov[i * m + j] = rep.exact_cov[j * m + i] = exact;
            rep.rel_err[i * m + j] = rep.rel_err[j * m + i] = err;
            rep.max_rel_err = std::max(rep.max_rel_err, err);
        }
    }
    return rep;
}

struct FieldCovReport {
    double s = 0.0, t = 0.0, x = 0.0, y = 0.0;
    double emp_cov = 0.0, exact_cov = 0.0, cov_rel_err = 0.0;
    double emp_var1 = 0.0, exact_var1 = 0.0;
    double emp_var2 = 0.0, exact_var2 = 0.0;
    double max_rel_err = 0.0;
};

// Covariance of the scaled empirical-CDF field sqrt(n)(Phi_n - Phi) at two
// space-time points against P(B(s)<=x, B(t)<=y) - Phi(x,s) Phi(y,t).
inline FieldCovReport empirical_field_cov(const EnsembleConfig& cfg, double s, double x, double t,
                                          double y) {
    if (!(s >= 0.0 && t >= 0.0)) throw domain_error("empirical_field_cov: times must be >= 0");
    if (cfg.n == 0 || cfg.replicas == 0) throw domain_error("empirical_field_cov: empty ensemble");
    const HeatField field(cfg.mixture);
    // order the two probes by time for the simulation pass
    const bool swapped = t < s;
    const double s0 = swapped ? t : s, x0 = swapped ? y : x;
    const double t1 = swapped ? s : t, y1 = swapped ? x : y;

    const double p1 = field.cdf(x0, s0);
    const double p2 = field.cdf(y1, t1);
    const double scale = std::sqrt(double(cfg.n));
    std::vector<double> g1(cfg.replicas), g2(cfg.replicas);
    const bool same_time = t1 <= s0;
    std::vector<double> sim_times{s0};
    if (!same_time) sim_times.push_back(t1);
    parallel_for(cfg.replicas, cfg.threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scratch(cfg.n * sim_times.size());
        for (std::size_t r = lo; r < hi; ++r) {
            const std::uint64_t rep_seed = split_seed(cfg.seed, r);
            for (std::size_t p = 0; p < cfg.n; ++p)
                detail::simulate_particle(cfg.mixture, sim_times,
                                          detail::particle_stream_seed(rep_seed, p),
                                          &scratch[p], cfg.n);
            std::size_t c1 = 0, c2 = 0;
            const double* col1 = &scratch[0];
            const double* col2 = same_time ? col1 : &scratch[cfg.n];
            for (std::size_t p = 0; p < cfg.n; ++p) {
                c1 += col1[p] <= x0;
                c2 += col2[p] <= y1;
            }
            g1[r] = scale * (double(c1) / double(cfg.n) - p1);
            g2[r] = scale * (double(c2) / double(cfg.n) - p2);
        }
    });

    FieldCovReport rep;
    rep.s = s;
    rep.t = t;
    rep.x = x;
    rep.y = y;
    const double emp12 = covariance(g1, g2);
    const double exact12 = field.joint_cdf(s0, t1, x0, y1) - p1 * p2;
    rep.emp_cov = emp12;
    rep.exact_cov = exact12;
    rep.cov_rel_err = std::fabs(emp12 - exact12) / std::fabs(exact12);
    rep.emp_var1 = swapped ? variance(g2) : variance(g1);
    rep.exact_var1 = swapped ? p2 * (1.0 - p2) : p1 * (1.0 - p1);
    rep.emp_var2 = swapped ? variance(g1) : variance(g2);
    rep.exact_var2 = swapped ? p1 * (1.0 - p1) : p2 * (1.0 - p2);
    rep.max_rel_err = std::max({rep.cov_rel_err,
                                std::fabs(rep.emp_var1 - rep.exact_var1) / rep.exact_var1,
                                std::fabs(rep.emp_var2 - rep.exact_var2) / rep.exact_var2});
    return rep;
}

struct TailReport {
    std::vector<double> lambdas;
    std::vector<double> freq;       // times.size() x lambdas.size(), row-major
    std::vector<double> threshold;  // 4 sqrt(rho(t,t)) per time
    std::vector<double> freq_at_threshold;
    bool pass = true;  // every threshold frequency <= 1e-3
};

// Tail frequencies P(|F_n(t)| > lambda) per requested time, plus the fixed
// four-sigma exceedance gate.
inline TailReport tail_check(const FluctuationSample& sample, const LimitKernel& kernel,
                             const std::vector<double>& lambdas) {
    TailReport rep;
    rep.lambdas = lambdas;
    const std::size_t tn = sample.times.size();
    rep.freq.resize(tn * lambdas.size());
    for (std::size_t k = 0; k < tn; ++k) {
        const std::vector<double> col = sample.column(k);
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            if (!(lambdas[li] > 0.0)) throw domain_error("tail_check: lambdas must be positive");
            std::size_t count = 0;
            for (double v : col) count += std::fabs(v) > lambdas[li];
            rep.freq[k * lambdas.size() + li] = double(count) / double(col.size());
        }
        const double lam = 4.0 * std::sqrt(kernel.rho(sample.times[k], sample.times[k]));
        std::size_t count = 0;
        for (double v : col) count += std::fabs(v) > lam;
        const double f = double(count) / double(col.size());
        rep.threshold.push_back(lam);
        rep.freq_at_threshold.push_back(f);
        if (f > 1e-3) rep.pass = false;
    }
    return rep;
}

}  // namespace qf
