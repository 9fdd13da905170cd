// Density, CDF, transition-kernel, and bivariate-normal primitives: frozen
// values, symmetry/limit properties, and a Monte Carlo cross-check of the
// two-time joint probability.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qf/errors.hpp"
#include "qf/mixture.hpp"
#include "qf/rng.hpp"

using Catch::Matchers::WithinAbs;

namespace {
qf::MixtureDensity bimodal() {
    return qf::MixtureDensity({{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}});
}
}  // namespace

TEST_CASE("mixture construction validates its invariants") {
    REQUIRE_THROWS_AS(qf::MixtureDensity({}), qf::domain_error);
    REQUIRE_THROWS_AS(qf::MixtureDensity({{0.0, 0.0, 1.0}}), qf::domain_error);
    REQUIRE_THROWS_AS(qf::MixtureDensity({{1.0, 0.0, -1.0}}), qf::domain_error);
    REQUIRE_THROWS_AS(qf::MixtureDensity({{0.6, 0.0, 1.0}, {0.6, 1.0, 1.0}}),
                      qf::domain_error);
    REQUIRE_NOTHROW(qf::MixtureDensity::standard_normal());
}

TEST_CASE("heat density frozen values and symmetry") {
    const qf::HeatField field(qf::MixtureDensity::standard_normal());
    CHECK_THAT(field.density(0.0, 0.0), WithinAbs(0.3989422804014327, 1e-12));
    CHECK_THAT(field.density(0.0, 1.0), WithinAbs(0.28209479177387814, 1e-12));
    for (double t : {0.0, 0.3, 1.0, 7.0}) CHECK_THAT(field.density(0.0, t, 1), WithinAbs(0.0, 1e-15));

    REQUIRE_THROWS_AS(field.density(0.0, -0.1), qf::domain_error);
    REQUIRE_THROWS_AS(field.density(0.0, 1.0, 5), qf::domain_error);
    REQUIRE_THROWS_AS(field.density(0.0, 1.0, -1), qf::domain_error);
}

TEST_CASE("heat density solves the diffusion equation") {
    // dt u = 1/2 dxx u; time derivative by fourth-order central difference.
    const double h = 5e-3;
    const std::vector<qf::HeatField> fields{
        qf::HeatField(qf::MixtureDensity::standard_normal()), qf::HeatField(bimodal())};
    for (const qf::HeatField& field : fields) {
        for (double t : {0.5, 1.0}) {
            for (double x : {-1.0, 0.0, 1.3}) {
                const double ut = (-field.density(x, t + 2 * h) + 8 * field.density(x, t + h) -
                                   8 * field.density(x, t - h) + field.density(x, t - 2 * h)) /
                                  (12 * h);
                const double uxx = field.density(x, t, 2);
                CHECK_THAT(ut - 0.5 * uxx, WithinAbs(0.0, 1e-8));
            }
        }
    }
}

TEST_CASE("cdf frozen values, symmetry, and tails") {
    const qf::HeatField gauss(qf::MixtureDensity::standard_normal());
    CHECK_THAT(gauss.cdf(1.0, 0.0), WithinAbs(0.8413447460685429, 1e-12));

    const qf::HeatField sym(bimodal());  // symmetric about 0
    for (double t : {0.0, 0.5, 2.0}) CHECK_THAT(sym.cdf(0.0, t), WithinAbs(0.5, 1e-14));

    for (double t : {0.0, 1.0}) {
        CHECK_THAT(gauss.cdf(40.0, t), WithinAbs(1.0, 1e-12));
        CHECK_THAT(gauss.cdf(-40.0, t), WithinAbs(0.0, 1e-12));
    }
    REQUIRE_THROWS_AS(gauss.cdf(0.0, -1e-9), qf::domain_error);
}

TEST_CASE("transition density frozen values") {
    CHECK_THAT(qf::transition_density(1.0, 0.7, 0.7), WithinAbs(0.3989422804014327, 1e-12));
    CHECK_THAT(qf::transition_density(2.0, 0.0, 2.0), WithinAbs(0.10377687435514868, 1e-12));
    REQUIRE_THROWS_AS(qf::transition_density(0.0, 0.0, 0.0), qf::domain_error);
    REQUIRE_THROWS_AS(qf::transition_density(-1.0, 0.0, 0.0), qf::domain_error);
}

TEST_CASE("bivariate normal cdf frozen values") {
    CHECK_THAT(qf::phi2(0.0, 0.0, 0.0), WithinAbs(0.25, 1e-12));
    CHECK_THAT(qf::phi2(0.0, 0.0, 0.5), WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(qf::phi2(0.5, 1.0, 1.0), WithinAbs(0.6914624612740131, 1e-12));
    REQUIRE_THROWS_AS(qf::phi2(0.0, 0.0, 1.5), qf::domain_error);
    REQUIRE_THROWS_AS(qf::phi2(0.0, 0.0, -1.01), qf::domain_error);
}

TEST_CASE("bivariate normal cdf structural properties") {
    // Symmetry in (h,k), reflection against the complement, monotonicity in r.
    for (double h : {-0.7, 0.2, 1.1}) {
        for (double k : {-1.0, 0.4}) {
            for (double r : {-0.8, 0.0, 0.6}) {
                CHECK_THAT(qf::phi2(h, k, r) - qf::phi2(k, h, r), WithinAbs(0.0, 1e-12));
                const double refl = qf::norm_cdf(h) - qf::phi2(h, -k, -r);
                CHECK_THAT(qf::phi2(h, k, r) - refl, WithinAbs(0.0, 1e-12));
            }
            double prev = -1.0;
            for (double r = -0.95; r <= 0.96; r += 0.19) {
                const double v = qf::phi2(h, k, r);
                CHECK(v >= prev - 1e-14);
                prev = v;
            }
        }
    }
}

TEST_CASE("two-time joint probability: degenerate and frozen cases") {
    const qf::HeatField field(qf::MixtureDensity::standard_normal());
    CHECK_THAT(field.joint_cdf(1.0, 1.0, 1.0, 0.0) - field.cdf(0.0, 1.0), WithinAbs(0.0, 1e-12));
    CHECK_THAT(field.joint_cdf(0.0, 1.0, 0.0, 0.0), WithinAbs(0.375, 1e-12));
    REQUIRE_THROWS_AS(field.joint_cdf(-0.5, 1.0, 0.0, 0.0), qf::domain_error);
}

TEST_CASE("two-time joint probability is bounded by its marginals") {
    const qf::HeatField field(bimodal());
    for (double s : {0.0, 0.4}) {
        for (double t : {0.6, 1.7}) {
            for (double a : {-0.9, 0.3}) {
                for (double b : {-0.2, 1.1}) {
                    const double joint = field.joint_cdf(s, t, a, b);
                    CHECK(joint <= std::min(field.cdf(a, s), field.cdf(b, t)) + 1e-14);
                    CHECK(joint >= field.cdf(a, s) + field.cdf(b, t) - 1.0 - 1e-14);
                }
            }
        }
    }
}

TEST_CASE("two-time joint probability matches Monte Carlo") {
    const qf::HeatField field(qf::MixtureDensity::standard_normal());
    const double s = 0.5, t = 1.5, a = 0.2, b = -0.1;
    const double exact = field.joint_cdf(s, t, a, b);

    const std::size_t n = 10'000'000;
    qf::RandomStream rng(5150);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double start = rng.normal();
        const double bs = start + std::sqrt(s) * rng.normal();
        const double bt = bs + std::sqrt(t - s) * rng.normal();
        if (bs <= a && bt <= b) ++hits;
    }
    const double est = double(hits) / double(n);
    const double se = std::sqrt(est * (1.0 - est) / double(n));
    CHECK_THAT(est - exact, WithinAbs(0.0, 3.0 * se));
}
