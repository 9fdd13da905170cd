// Particle-ensemble Monte Carlo: order-statistic law checks, fluctuation
// variance against the limit kernel, bridge and field covariances,
// tail frequencies, and the determinism/validation contract.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qf/errors.hpp"
#include "qf/limit_kernel.hpp"
#include "qf/particles.hpp"
#include "qf/quantile_curve.hpp"
#include "qf/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

qf::EnsembleConfig base_config() {
    qf::EnsembleConfig cfg;
    cfg.mixture = qf::MixtureDensity::standard_normal();
    cfg.alpha = 0.5;
    return cfg;
}

// Shared large ensemble (n = replicas = 10^4 at t = 0); sampled once.
const qf::FluctuationSample& big_sample() {
    static const qf::FluctuationSample sample = [] {
        qf::EnsembleConfig cfg = base_config();
        cfg.n = 10000;
        cfg.replicas = 10000;
        cfg.times = {0.0};
        cfg.seed = 607;
        return qf::simulate_ensemble(cfg);
    }();
    return sample;
}

}  // namespace

TEST_CASE("minimum of two standard normals has mean -1/sqrt(pi)") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 2;
    cfg.rank = 1;
    cfg.replicas = 1000000;
    cfg.times = {0.0};
    cfg.seed = 606;
    const qf::FluctuationSample sample = qf::simulate_ensemble(cfg);

    const double scale = std::sqrt(2.0);
    std::vector<double> stats(sample.replicas);
    for (std::size_t r = 0; r < sample.replicas; ++r)
        stats[r] = sample.qs[0] + sample.value(r, 0) / scale;
    const double m = qf::mean(stats);
    const double se = qf::standard_error_mean(stats);
    CHECK_THAT(m, WithinAbs(-0.5641895835477563, 3.0 * se));
}

TEST_CASE("median fluctuation variance approaches pi/2") {
    const qf::FluctuationSample& sample = big_sample();
    const std::vector<double> col = sample.column(0);
    CHECK_THAT(qf::variance(col), WithinRel(1.5707963267948966, 0.05));
}

TEST_CASE("tail frequencies are monotone and pass the four-sigma gate") {
    const qf::LimitKernel kernel(
        qf::QuantileCurve(qf::HeatField(qf::MixtureDensity::standard_normal()), 0.5));
    const qf::FluctuationSample& sample = big_sample();
    const std::vector<double> lambdas{1e-6, 0.5, 1.0, 2.0, 4.0};
    const qf::TailReport rep = qf::tail_check(sample, kernel, lambdas);

    CHECK(rep.freq[0] >= 0.999);  // tiny level: everything exceeds it
    for (std::size_t li = 1; li < lambdas.size(); ++li)
        CHECK(rep.freq[li] <= rep.freq[li - 1] + 1e-15);
    CHECK(rep.pass);
    CHECK(rep.freq_at_threshold[0] <= 1e-3);

    REQUIRE_THROWS_AS(qf::tail_check(sample, kernel, {0.0}), qf::domain_error);
}

TEST_CASE("replica mean of the order statistic recovers the quantile curve") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 10000;
    cfg.replicas = 100;
    cfg.times = {0.5};
    cfg.seed = 608;
    const qf::FluctuationSample sample = qf::simulate_ensemble(cfg);
    std::vector<double> stats(sample.replicas);
    const double scale = std::sqrt(double(cfg.n));
    for (std::size_t r = 0; r < sample.replicas; ++r)
        stats[r] = sample.qs[0] + sample.value(r, 0) / scale;
    const double se = qf::standard_error_mean(stats);
    CHECK_THAT(qf::mean(stats), WithinAbs(sample.qs[0], 3.0 * se));
}

TEST_CASE("default rank rule deviates from alpha by o(n^{-1/2})") {
    const double alpha = 1.0 / 3.0;
    double prev = 1e300;
    for (std::size_t n : {std::size_t(100), std::size_t(1000), std::size_t(10000)}) {
        const std::size_t j = qf::detail::default_rank(alpha, n);
        const double dev = std::fabs(double(j) / double(n) - alpha) * std::sqrt(double(n));
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("duplicate requested times produce identical columns") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 50;
    cfg.replicas = 200;
    cfg.times = {0.5, 0.5, 1.0};
    cfg.seed = 609;
    const qf::FluctuationSample sample = qf::simulate_ensemble(cfg);
    CHECK(sample.qs[0] == sample.qs[1]);
    for (std::size_t r = 0; r < sample.replicas; ++r)
        CHECK(sample.value(r, 0) == sample.value(r, 1));
}

TEST_CASE("ensemble simulation is deterministic in seed and worker count") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 64;
    cfg.replicas = 128;
    cfg.times = {0.0, 0.3, 1.2};
    cfg.seed = 610;
    cfg.threads = 1;
    const qf::FluctuationSample a = qf::simulate_ensemble(cfg);
    cfg.threads = 4;
    const qf::FluctuationSample b = qf::simulate_ensemble(cfg);
    CHECK(std::equal(a.values.begin(), a.values.end(), b.values.begin()));
    cfg.seed = 611;
    const qf::FluctuationSample c = qf::simulate_ensemble(cfg);
    CHECK(!std::equal(a.values.begin(), a.values.end(), c.values.begin()));
}

TEST_CASE("ensemble configuration validation") {
    qf::EnsembleConfig cfg = base_config();
    cfg.replicas = 1;
    cfg.times = {0.0};
    cfg.n = 0;
    REQUIRE_THROWS_AS(qf::simulate_ensemble(cfg), qf::domain_error);
    cfg.n = 10;
    cfg.times = {1.0, 0.5};
    REQUIRE_THROWS_AS(qf::simulate_ensemble(cfg), qf::domain_error);
    cfg.times = {-1.0};
    REQUIRE_THROWS_AS(qf::simulate_ensemble(cfg), qf::domain_error);
    cfg.times = {0.0};
    cfg.rank = 11;
    REQUIRE_THROWS_AS(qf::simulate_ensemble(cfg), qf::domain_error);
    cfg.rank = 0;
    cfg.times = {0.0, 0.5};
    cfg.memory_budget = 10;  // far below n x times
    REQUIRE_THROWS_AS(qf::simulate_ensemble(cfg), qf::config_error);
}

TEST_CASE("fdd covariance report shape against the kernel") {
    const qf::LimitKernel kernel(
        qf::QuantileCurve(qf::HeatField(qf::MixtureDensity::standard_normal()), 0.5));
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 2000;
    cfg.replicas = 4000;
    cfg.times = {0.0, 1.0};
    cfg.seed = 612;
    const qf::FluctuationSample sample = qf::simulate_ensemble(cfg);
    const qf::FddReport rep = qf::fdd_covariance_check(sample, kernel);
    CHECK(rep.emp_cov.size() == 4);
    CHECK_THAT(rep.kernel_cov[0], WithinAbs(1.5707963267948966, 1e-10));
    CHECK(rep.max_rel_err < 0.15);  // loose gate for the small ensemble
    CHECK(rep.max_abs_kurtosis < 0.5);
}

TEST_CASE("fixed-time bridge covariance matches min(a,b) - ab") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 1000;
    cfg.replicas = 2000;
    cfg.seed = 613;
    const qf::BridgeReport rep = qf::fixed_time_bridge_check(cfg, 1.0, {0.25, 0.75});
    CHECK_THAT(rep.exact_cov[0], WithinAbs(0.1875, 1e-15));
    CHECK_THAT(rep.exact_cov[1], WithinAbs(0.0625, 1e-15));
    CHECK(rep.max_rel_err < 0.25);

    REQUIRE_THROWS_AS(qf::fixed_time_bridge_check(cfg, 1.0, {0.75, 0.25}), qf::domain_error);
    REQUIRE_THROWS_AS(qf::fixed_time_bridge_check(cfg, 1.0, {0.25, 1.5}), qf::domain_error);
    qf::EnsembleConfig tiny = base_config();
    tiny.n = 100;
    tiny.replicas = 10;
    // adjacent levels collapse onto the same order statistic at this n
    REQUIRE_THROWS_AS(qf::fixed_time_bridge_check(tiny, 1.0, {0.495, 0.5}), qf::domain_error);
}

TEST_CASE("empirical cdf field covariance matches the joint-probability formula") {
    qf::EnsembleConfig cfg = base_config();
    cfg.n = 2000;
    cfg.replicas = 2000;
    cfg.seed = 614;

    const qf::FieldCovReport same = qf::empirical_field_cov(cfg, 1.0, 0.0, 1.0, 0.0);
    CHECK_THAT(same.exact_cov, WithinAbs(0.25, 1e-12));
    CHECK_THAT(same.emp_cov, WithinRel(0.25, 0.15));

    const qf::FieldCovReport cross = qf::empirical_field_cov(cfg, 0.0, 0.0, 1.0, 0.0);
    CHECK_THAT(cross.exact_cov, WithinAbs(0.125, 1e-12));
    CHECK(cross.max_rel_err < 0.25);
}
