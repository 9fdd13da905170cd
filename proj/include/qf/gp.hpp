#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qf/errors.hpp"
#include "qf/limit_kernel.hpp"
#include "qf/linalg.hpp"
#include "qf/parallel.hpp"
#include "qf/quadrature.hpp"
#include "qf/rng.hpp"
#include "qf/stats.hpp"

namespace qf {

inline constexpr std::size_t gp_max_grid = 8192;

// Gaussian-process path ensemble on a fixed time grid.
struct GpSample {
    std::vector<double> grid;
    std::size_t replicas = 0;
    std::vector<double> paths;  // replicas x grid.size(), row-major
    std::uint64_t seed = 0;
    std::uint64_t kernel_fingerprint = 0;
    double jitter = 0.0;  // diagonal jitter the factorization needed

    const double* path(std::size_t r) const { return &paths[r * grid.size()]; }
};

namespace detail {

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw domain_error("sample_gp: empty grid");
    if (grid.size() > gp_max_grid) throw domain_error("sample_gp: grid exceeds 8192 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0)) throw domain_error("sample_gp: grid times must be >= 0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw domain_error("sample_gp: grid must be strictly increasing");
    }
}

// Factor the covariance and push one independent normal vector per replica
// through it.  Replica r draws from substream split_seed(seed, r) and fills
// only its own row, so output is bit-identical for any worker count.
inline GpSample sample_from_cov(const std::vector<double>& cov, std::vector<double> grid,
                                std::size_t replicas, std::uint64_t seed,
                                std::uint64_t fingerprint, unsigned threads) {
    const std::size_t n = grid.size();
    std::vector<double> l;
    const CholeskyInfo info = cholesky_factor(cov, n, l);

    GpSample out;
    out.grid = std::move(grid);
    out.replicas = replicas;
    out.seed = seed;
    out.kernel_fingerprint = fingerprint;
    out.jitter = info.jitter;
    out.paths.assign(replicas * n, 0.0);
    parallel_for(replicas, threads, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> z(n);
        for (std::size_t r = lo; r < hi; ++r) {
            RandomStream stream(split_seed(seed, r));
            for (auto& v : z) v = stream.normal();
            lower_matvec(l, n, z.data(), &out.paths[r * n]);
        }
    });
    return out;
}

}  // namespace detail

// Ensemble of limit-process paths with covariance rho on the given grid.
inline GpSample sample_gp(const LimitKernel& kernel, std::vector<double> grid,
                          std::size_t replicas, std::uint64_t seed, unsigned threads = 1) {
    detail::check_grid(grid);
    if (replicas == 0) throw domain_error("sample_gp: need at least one replica");
    const std::vector<double> cov = kernel.gram(grid, threads);
    const std::uint64_t fp =
        detail::fnv1a(kernel.curve().alpha(), kernel.curve().field().base().fingerprint());
    return detail::sample_from_cov(cov, std::move(grid), replicas, seed, fp, threads);
}

// Fractional Brownian motion with Hurst index 1/4, covariance
// (s^{1/2} + t^{1/2} - |t-s|^{1/2}) / 2: the calibration benchmark whose
// quartic variation and structure-function slope are known exactly.
inline GpSample sample_fbm_quarter(std::vector<double> grid, std::size_t replicas,
                                   std::uint64_t seed, unsigned threads = 1) {
    detail::check_grid(grid);
    if (replicas == 0) throw domain_error("sample_fbm_quarter: need at least one replica");
    const std::size_t n = grid.size();
    std::vector<double> cov(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov[i * n + j] = 0.5 * (std::sqrt(grid[i]) + std::sqrt(grid[j]) -
                                    std::sqrt(std::fabs(grid[i] - grid[j])));
    const std::uint64_t fp = detail::fnv1a(0.25, 0x66626d00ull);
    return detail::sample_from_cov(cov, std::move(grid), replicas, seed, fp, threads);
}

// Quartic variation sum_{0 < t_j <= t} (X(t_j) - X(t_{j-1}))^4 of one path.
inline double quartic_variation(const GpSample& sample, std::size_t replica, double t) {
    if (replica >= sample.replicas) throw domain_error("quartic_variation: replica out of range");
    if (sample.grid.size() < 2) throw domain_error("quartic_variation: need at least two grid points");
    if (t > sample.grid.back() * (1.0 + 1e-12) + 1e-300)
        throw domain_error("quartic_variation: t beyond grid horizon");
    const double* path = sample.path(replica);
    double sum = 0.0;
    for (std::size_t j = 1; j < sample.grid.size() && sample.grid[j] <= t; ++j) {
        const double d = path[j] - path[j - 1];
        sum += d * d * d * d;
    }
    return sum;
}

// Deterministic limit of the quartic variation on [0,t]:
// (6/pi) * integral of theta(s)^2 ds, by adaptive Simpson to 1e-10.
inline double quartic_limit(const LimitKernel& kernel, double t) {
    if (!(t >= 0.0)) throw domain_error("quartic_limit: t must be >= 0");
    if (t == 0.0) return 0.0;
    const QuantileCurve& curve = kernel.curve();
    const double integral = adaptive_simpson(
        [&](double s) {
            const double th = curve.theta(s);
            return th * th;
        },
        0.0, t, 1e-10);
    return 6.0 / pi * integral;
}

struct MsIncrementCell {
    double t0 = 0.0, t1 = 0.0;
    double exact = 0.0;  // kernel value of E|dF~|^2 over the cell
    double local = 0.0;  // sqrt(2/pi) sqrt(dt) u(q(t1),t1)
};

struct MsIncrementReport {
    std::vector<MsIncrementCell> cells;
    double max_rel_diff = 0.0;
    double fitted_const = 0.0;  // max |exact - local| / dt^{3/2}
};

// Mean-square increments of the unscaled fluctuation field versus their local
// square-root approximation, cell by cell on the given grid.
inline MsIncrementReport mean_sq_increment_check(const LimitKernel& kernel,
                                                 const std::vector<double>& grid) {
    if (grid.size() < 2) throw domain_error("mean_sq_increment_check: need at least two points");
    const QuantileCurve& curve = kernel.curve();
    const double a = curve.alpha();
    const double diag = a - a * a;  // rho_tilde on the diagonal, any t
    MsIncrementReport rep;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        MsIncrementCell cell;
        cell.t0 = grid[j - 1];
        cell.t1 = grid[j];
        const double dt = cell.t1 - cell.t0;
        if (!(dt > 0.0)) throw domain_error("mean_sq_increment_check: grid must increase");
        cell.exact = 2.0 * (diag - kernel.rho_tilde(cell.t0, cell.t1));
        cell.local = std::sqrt(2.0 / pi) * std::sqrt(dt) *
                     curve.field().density(curve.quantile(cell.t1), cell.t1);
        rep.max_rel_diff = std::max(rep.max_rel_diff,
                                    std::fabs(cell.exact - cell.local) / cell.local);
        rep.fitted_const = std::max(rep.fitted_const,
                                    std::fabs(cell.exact - cell.local) / std::pow(dt, 1.5));
        rep.cells.push_back(cell);
    }
    return rep;
}

// Hurst-index estimate from pooled dyadic structure functions:
// S(l) = mean (X(t_{j+l}) - X(t_j))^2 over paths and j, slope of
// log S against log lag, halved.  Requires a uniform grid offering at
// least four dyadic lags below max_lag.
inline double hurst_estimate(const GpSample& sample, std::size_t max_lag = 64) {
    const std::size_t n = sample.grid.size();
    if (n < 2) throw domain_error("hurst_estimate: need at least two grid points");
    const double dt = sample.grid[1] - sample.grid[0];
    for (std::size_t j = 1; j < n; ++j)
        if (std::fabs(sample.grid[j] - sample.grid[j - 1] - dt) > 1e-9 * dt)
            throw domain_error("hurst_estimate: grid must be uniform");
    std::vector<double> log_lag, log_s;
    for (std::size_t lag = 1; lag <= max_lag && lag <= (n - 1) / 2; lag *= 2) {
        double s = 0.0;
        std::size_t count = 0;
        for (std::size_t r = 0; r < sample.replicas; ++r) {
            const double* path = sample.path(r);
            for (std::size_t j = 0; j + lag < n; ++j) {
                const double d = path[j + lag] - path[j];
                s += d * d;
                ++count;
            }
        }
        log_lag.push_back(std::log(double(lag) * dt));
        log_s.push_back(std::log(s / double(count)));
    }
    if (log_lag.size() < 4) throw domain_error("hurst_estimate: fewer than four dyadic lags");
    return 0.5 * least_squares(log_lag, log_s).slope;
}

// Sampling-free variant: regresses log msd(t0, t0+gap) on log gap directly
// on the kernel, at the supplied gaps.
inline double hurst_from_kernel(const LimitKernel& kernel, double t0,
                                const std::vector<double>& gaps) {
    if (gaps.size() < 2) throw domain_error("hurst_from_kernel: need at least two gaps");
    std::vector<double> log_gap, log_m;
    for (double g : gaps) {
        if (!(g > 0.0)) throw domain_error("hurst_from_kernel: gaps must be positive");
        log_gap.push_back(std::log(g));
        log_m.push_back(std::log(kernel.msd(t0, t0 + g)));
    }
    return 0.5 * least_squares(log_gap, log_m).slope;
}

}  // namespace qf
