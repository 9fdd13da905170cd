// Random-walk representation of order-statistic crossings: exact psi/phi
// probabilities with their duals, conditional split probabilities, mu/sigma
// tail parameters, the sandwich Monte Carlo bracket, the crossing-mass Taylor
// expansion, and the beta/binomial support layer.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qf/binomial.hpp"
#include "qf/errors.hpp"
#include "qf/quantile_curve.hpp"
#include "qf/rng.hpp"
#include "qf/rw.hpp"

using Catch::Matchers::WithinAbs;

namespace {
qf::QuantileCurve gauss_median() {
    return qf::QuantileCurve(qf::HeatField(qf::MixtureDensity::standard_normal()), 0.5);
}
}  // namespace

TEST_CASE("psi frozen values and boundary ranks") {
    // j=2 of n=3, both marking probabilities 1/2: enumerate two Bernoulli draws.
    CHECK_THAT(qf::psi({2, 3, 0.5, 0.5}, qf::Rel::le), WithinAbs(0.75, 1e-15));
    for (double r1 : {0.0, 0.3, 1.0}) {
        for (double r2 : {0.0, 0.7, 1.0}) {
            CHECK(qf::psi({1, 5, r1, r2}, qf::Rel::le) == 1.0);   // L == 0 always
            CHECK(qf::psi({5, 5, r1, r2}, qf::Rel::lt) == 0.0);   // U == 0 always
        }
    }
}

TEST_CASE("psi complements are exact") {
    const qf::RwParams p{3, 7, 0.4, 0.25};
    CHECK(qf::psi(p, qf::Rel::gt) == 1.0 - qf::psi(p, qf::Rel::le));
    CHECK(qf::psi(p, qf::Rel::ge) == 1.0 - qf::psi(p, qf::Rel::lt));
    CHECK(qf::psi(p, qf::Rel::lt) <= qf::psi(p, qf::Rel::le));
}

TEST_CASE("psi matches direct enumeration on spot cases") {
    // Sum over (l, m) of P(L=l) P(U=m) with the relation applied directly.
    const auto brute = [](std::size_t j, std::size_t n, double r1, double r2, bool strict) {
        const std::vector<double> pl = qf::binomial_pmf(j - 1, r1);
        const std::vector<double> pu = qf::binomial_pmf(n - j, r2);
        double acc = 0.0;
        for (std::size_t l = 0; l < pl.size(); ++l)
            for (std::size_t m = 0; m < pu.size(); ++m)
                if (strict ? l < m : l <= m) acc += pl[l] * pu[m];
        return acc;
    };
    for (const auto& [j, n] : std::vector<std::pair<std::size_t, std::size_t>>{
             {2, 5}, {3, 6}, {5, 9}}) {
        for (double r1 : {0.2, 0.6}) {
            for (double r2 : {0.35, 0.8}) {
                CHECK_THAT(qf::psi({j, n, r1, r2}, qf::Rel::le) - brute(j, n, r1, r2, false),
                           WithinAbs(0.0, 1e-14));
                CHECK_THAT(qf::psi({j, n, r1, r2}, qf::Rel::lt) - brute(j, n, r1, r2, true),
                           WithinAbs(0.0, 1e-14));
            }
        }
    }
}

TEST_CASE("split probabilities: symmetric frozen case") {
    const qf::QuantileCurve curve = gauss_median();
    const qf::SplitProbs sp = qf::split_probs(curve, 0.0, 1.0, 0.0, 0.0);
    // P(B(1) > 0 | B(0) < 0) = (1/2 - 3/8) / (1/2) = 1/4, and symmetrically.
    CHECK_THAT(sp.q1, WithinAbs(0.25, 1e-12));
    CHECK_THAT(sp.q2, WithinAbs(0.25, 1e-12));

    REQUIRE_THROWS_AS(qf::split_probs(curve, 1.0, 1.0, 0.0, 0.0), qf::domain_error);
    REQUIRE_THROWS_AS(qf::split_probs(curve, -0.1, 1.0, 0.0, 0.0), qf::domain_error);
    // conditioning event vanishes numerically far in the tail
    REQUIRE_THROWS_AS(qf::split_probs(curve, 0.0, 1.0, -1e9, 0.0), qf::numeric_error);
}

TEST_CASE("split probabilities match a conditional Monte Carlo oracle") {
    const qf::QuantileCurve curve = gauss_median();
    const double s = 0.5, t = 1.5, x = 0.1, y = -0.05;
    const qf::SplitProbs sp = qf::split_probs(curve, s, t, x, y);
    const double qs = curve.quantile(s), qt = curve.quantile(t);

    qf::RandomStream rng(8215);
    const std::size_t n = 10'000'000;
    std::size_t below = 0, hit1 = 0, hit2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double start = rng.normal();
        const double bs = start + std::sqrt(s) * rng.normal();
        const double bt = bs + std::sqrt(t - s) * rng.normal();
        if (bs < qs + x) {
            ++below;
            if (bt > qt + x + y) ++hit1;
        } else if (bt < qt + x + y) {
            ++hit2;
        }
    }
    const double m1 = double(below), m2 = double(n - below);
    const double e1 = double(hit1) / m1, e2 = double(hit2) / m2;
    const double se1 = std::sqrt(e1 * (1.0 - e1) / m1);
    const double se2 = std::sqrt(e2 * (1.0 - e2) / m2);
    CHECK_THAT(e1 - sp.q1, WithinAbs(0.0, 3.0 * se1));
    CHECK_THAT(e2 - sp.q2, WithinAbs(0.0, 3.0 * se2));
}

TEST_CASE("phi duals: reversed relations swap rank and split probabilities") {
    const qf::QuantileCurve curve = gauss_median();
    const double s = 0.3, t = 0.9, x = 0.05, y = -0.1;
    const qf::SplitProbs sp = qf::split_probs(curve, s, t, x, y);
    const std::size_t n = 11;
    for (std::size_t j : {std::size_t(1), std::size_t(4), std::size_t(8), n}) {
        const double gt = qf::phi_prob(curve, j, n, s, t, x, y, qf::Rel::gt);
        const double ge = qf::phi_prob(curve, j, n, s, t, x, y, qf::Rel::ge);
        CHECK_THAT(gt - qf::psi({n - j + 1, n, sp.q2, sp.q1}, qf::Rel::lt),
                   WithinAbs(0.0, 1e-12));
        CHECK_THAT(ge - qf::psi({n - j + 1, n, sp.q2, sp.q1}, qf::Rel::le),
                   WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("mu and sigma of the marked-difference walk") {
    CHECK(qf::mu_sigma(0.5, 0.37, 0.37).mu == 0.0);
    CHECK_THAT(qf::mu_sigma(0.5, 0.25, 0.25).sigma, WithinAbs(0.25, 1e-15));
    const qf::MuSigma ms = qf::mu_sigma(0.3, 0.2, 0.1);
    CHECK_THAT(ms.mu, WithinAbs(-0.01, 1e-15));
    CHECK_THAT(ms.sigma, WithinAbs(0.13, 1e-15));
    for (double a : {0.2, 0.5, 0.9})
        for (double r1 : {0.1, 0.8})
            for (double r2 : {0.0, 0.5}) {
                const qf::MuSigma m = qf::mu_sigma(a, r1, r2);
                CHECK(std::fabs(m.mu) <= m.sigma + 1e-15);
            }
}

TEST_CASE("tail-bound ratio: hypothesis check and degenerate numerator") {
    // mu <= 0 violates the estimate's hypothesis.
    REQUIRE_THROWS_AS(qf::rwest_ratio({5, 10, 0.1, 0.5}, 0.3, 2.0), qf::domain_error);
    REQUIRE_THROWS_AS(qf::rwest_ratio({5, 10, 0.5, 0.1}, 0.5, 1.0), qf::domain_error);
    // psi_le = 0 when the lower walk dominates surely: ratio collapses to 0.
    CHECK(qf::rwest_ratio({6, 6, 1.0, 0.0}, 0.5, 2.0) == 0.0);

    const qf::RwestCheck c = qf::rwest_check(100, 0.5, 0.2, 0.1, 2.0);
    CHECK(c.rank == 50);
    CHECK_THAT(c.mu, WithinAbs(0.05, 1e-15));
    CHECK_THAT(c.sigma, WithinAbs(0.15, 1e-15));
    CHECK(c.psi_le > 0.0);
    CHECK_THAT(c.ratio - c.psi_le / c.bound, WithinAbs(0.0, 1e-12));
}

TEST_CASE("sandwich bracket: boundary cases") {
    const qf::QuantileCurve curve = gauss_median();

    // y far above the path scale: the event and both bounds are certain.
    const qf::SandwichResult far =
        qf::sandwich_check(curve, 10, 20, 0.5, 0.6, 10.0, 500, 1234);
    CHECK(far.mean_indicator == 1.0);
    CHECK_THAT(far.mean_lower, WithinAbs(1.0, 1e-9));
    CHECK_THAT(far.mean_upper, WithinAbs(1.0, 1e-12));
    CHECK(far.pass);

    // rank 1: the non-strict upper bound is identically one.
    const qf::SandwichResult first =
        qf::sandwich_check(curve, 1, 20, 0.5, 0.6, -0.05, 500, 1235);
    CHECK_THAT(first.mean_upper, WithinAbs(1.0, 1e-12));
    CHECK(first.upper_margin >= 0.0);

    REQUIRE_THROWS_AS(qf::sandwich_check(curve, 0, 20, 0.5, 0.6, 0.0, 500, 1), qf::domain_error);
    REQUIRE_THROWS_AS(qf::sandwich_check(curve, 5, 20, 0.7, 0.6, 0.0, 500, 1), qf::domain_error);
}

TEST_CASE("sandwich bracket holds on a moderate configuration") {
    const qf::QuantileCurve curve = gauss_median();
    const qf::SandwichResult r =
        qf::sandwich_check(curve, 100, 200, 0.5, 0.6, -0.05, 20000, 1236);
    CHECK(r.pass);
    CHECK(r.mean_lower <= r.mean_indicator + 3.0 * r.lower_se);
    CHECK(r.mean_indicator <= r.mean_upper + 3.0 * r.upper_se);
}

TEST_CASE("crossing-mass expansion: exact at the origin, stable across scales") {
    const qf::QuantileCurve curve = gauss_median();
    const qf::TaylorCheck origin = qf::taylor_check(curve, 0.5, 0.01, 0.0, 0.0);
    CHECK(origin.remainder == 0.0);
    CHECK(origin.ratio == 0.0);
    CHECK_THAT(origin.q1_remainder, WithinAbs(0.0, 1e-12));
    CHECK_THAT(origin.q2_remainder, WithinAbs(0.0, 1e-12));

    // y scaled as delta^{0.6}: remainder within its structural bound across
    // three decades of gap width.
    for (double delta : {0.1, 0.01, 0.001}) {
        for (double sign : {1.0, -1.0}) {
            const qf::TaylorCheck tc =
                qf::taylor_check(curve, 0.5, delta, 0.0, sign * std::pow(delta, 0.6));
            CHECK(tc.bound > 0.0);
            CHECK(std::fabs(tc.remainder) <= 10.0 * tc.bound);
            CHECK(std::fabs(tc.q1_remainder) <= 10.0 * tc.bound);
            CHECK(std::fabs(tc.q2_remainder) <= 10.0 * tc.bound);
        }
    }
    REQUIRE_THROWS_AS(qf::taylor_check(curve, 0.5, 0.0, 0.0, 0.0), qf::domain_error);
}

TEST_CASE("order-statistic cdf: frozen values and route agreement") {
    CHECK_THAT(qf::order_stat_cdf(1, 2, 0.3), WithinAbs(0.51, 1e-12));
    CHECK_THAT(qf::order_stat_cdf(2, 3, 0.5), WithinAbs(0.5, 1e-12));
    for (double u : {0.0, 0.37, 1.0}) CHECK_THAT(qf::order_stat_cdf(1, 1, u), WithinAbs(u, 1e-14));

    qf::RandomStream rng(4242);
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 1 + std::size_t(rng.uniform() * 30.0);
        const std::size_t j = 1 + std::size_t(rng.uniform() * double(n - 1));
        const double u = rng.uniform();
        const qf::OrderStatCdf two = qf::order_stat_cdf_routes(j, n, u);
        CHECK_THAT(two.beta - two.quad, WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("regularized incomplete beta: symmetry and edges") {
    CHECK_THAT(qf::reg_inc_beta(2.0, 2.0, 0.5), WithinAbs(0.5, 1e-14));
    CHECK(qf::reg_inc_beta(3.0, 4.0, 0.0) == 0.0);
    CHECK(qf::reg_inc_beta(3.0, 4.0, 1.0) == 1.0);
    for (double x : {0.1, 0.42, 0.9})
        CHECK_THAT(qf::reg_inc_beta(2.5, 5.0, x) + qf::reg_inc_beta(5.0, 2.5, 1.0 - x),
                   WithinAbs(1.0, 1e-13));
    REQUIRE_THROWS_AS(qf::reg_inc_beta(0.0, 1.0, 0.5), qf::domain_error);
    REQUIRE_THROWS_AS(qf::reg_inc_beta(1.0, 1.0, 1.5), qf::domain_error);
}

TEST_CASE("binomial pmf, tails, and central moments") {
    const std::vector<double> pmf = qf::binomial_pmf(10, 0.3);
    double total = 0.0;
    for (double v : pmf) total += v;
    CHECK_THAT(total, WithinAbs(1.0, 1e-13));
    for (std::size_t k = 0; k <= 10; ++k) {
        const double direct = std::exp(qf::detail::log_choose(10, k) + double(k) * std::log(0.3) +
                                       double(10 - k) * std::log(0.7));
        CHECK_THAT(pmf[k] - direct, WithinAbs(0.0, 1e-14));
    }
    const std::vector<double> tail = qf::binomial_upper_tail(pmf);
    CHECK_THAT(tail[0], WithinAbs(1.0, 1e-13));
    CHECK(tail[11] == 0.0);
    for (std::size_t k = 1; k <= 10; ++k) CHECK(tail[k] <= tail[k - 1] + 1e-15);

    // Fourth central moment of Bin(10, 0.3): npq(1 + 3(n-2)pq).
    CHECK_THAT(qf::binomial_central_moment(10, 0.3, 4), WithinAbs(12.684, 1e-12));
    double brute = 0.0;
    for (std::size_t k = 0; k <= 10; ++k) {
        const double d = double(k) - 3.0;
        brute += pmf[k] * d * d * d * d;
    }
    CHECK_THAT(qf::binomial_central_moment(10, 0.3, 4) - brute, WithinAbs(0.0, 1e-12));
}

TEST_CASE("binomial moment bound check") {
    const qf::MomentCheck mc = qf::binomial_moment_check(10, 0.3, 2);
    CHECK_THAT(mc.moment, WithinAbs(12.684, 1e-12));
    CHECK_THAT(mc.bound, WithinAbs(9.0, 1e-13));
    CHECK_THAT(mc.ratio, WithinAbs(12.684 / 9.0, 1e-12));
    // variance case: E(S-np)^2 = npq <= np always
    const qf::MomentCheck var = qf::binomial_moment_check(50, 0.2, 1);
    CHECK(var.ratio <= 1.0);
}
