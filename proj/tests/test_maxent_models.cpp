#include <doctest.h>

#include <cmath>
#include <random>

#include "itn/errors.hpp"
#include "itn/maxent_models.hpp"

using namespace itn;

namespace {

// Sum of q(w) and w q(w) over w = 0..w_max plus the closed-form geometric tail.
struct Moments {
    double mass;
    double mean;
};

Moments ts_moments_by_summation(double zi, double zj, double yi, double yj) {
    const double zz = zi * zj;
    const double r = yi * yj;
    double mass = 0.0, mean = 0.0;
    std::int64_t w = 0;
    double remaining = 1.0;
    for (; w < 100000 && remaining >= 1e-14; ++w) {
        const double q = ts_weight_pmf(zi, zj, yi, yj, w);
        mass += q;
        mean += static_cast<double>(w) * q;
        // Mass above w: zz/(1+zz) r^w.
        remaining = zz / (1.0 + zz) * std::pow(r, static_cast<double>(w));
    }
    const double big_w = static_cast<double>(w - 1);
    const double lead = zz * (1.0 - r) / (1.0 + zz);
    mass += zz / (1.0 + zz) * std::pow(r, big_w);
    mean += lead * ((big_w + 1.0) * std::pow(r, big_w) - big_w * std::pow(r, big_w + 1.0)) / ((1.0 - r) * (1.0 - r));
    return {mass, mean};
}

}  // namespace

TEST_CASE("ecm link probability and expected weight") {
    CHECK(ecm_link_probability(1, 1, 0, 0) == 0.0);
    CHECK(ecm_link_probability(2, 2, 0.5, 0.5) == doctest::Approx(1.0 / 1.75).epsilon(1e-14));
    CHECK(ecm_link_probability(2, 2, 0.5, 0.5) == doctest::Approx(0.571428).epsilon(1e-6));
    CHECK(ecm_link_probability(0, 7, 0.9, 0.9) == 0.0);

    CHECK(ecm_expected_weight(2, 2, 0.5, 0.5) == doctest::Approx((1.0 / 1.75) / 0.75).epsilon(1e-14));
    CHECK(ecm_expected_weight(2, 2, 0.5, 0.5) == doctest::Approx(0.761905).epsilon(1e-6));
    CHECK(ecm_expected_weight(3, 2, 0.5, 0.0) == ecm_link_probability(3, 2, 0.5, 0.0));
    CHECK(ecm_expected_weight(0, 2, 0.5, 0.5) == 0.0);

    CHECK_THROWS_AS(ecm_link_probability(1, 1, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(ecm_link_probability(1, 1, -0.1, 0.5), DomainError);
    CHECK_THROWS_AS(ecm_expected_weight(1, 1, 0.5, 1.2), DomainError);
}

TEST_CASE("bcm and two-step pair quantities") {
    CHECK(bcm_link_probability(1, 1) == 0.5);
    CHECK(bcm_link_probability(0, 3) == 0.0);
    CHECK(bcm_link_probability(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK_THROWS_AS(bcm_link_probability(-1, 1), DomainError);

    const double y = std::sqrt(0.5);
    CHECK(ts_expected_weight(1, 1, y, y) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ts_expected_weight(2, 0.5, 0.0, 0.7) == ts_link_probability(2, 0.5));
    CHECK(ts_expected_weight(0, 0.5, 0.3, 0.7) == 0.0);

    CHECK(ts_weight_pmf(1, 1, y, y, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ts_weight_pmf(1, 1, y, y, 2) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK_THROWS_AS(ts_weight_pmf(1, 1, y, y, -1), DomainError);
}

TEST_CASE("wcm geometric pmf") {
    const double y = std::sqrt(0.4);
    CHECK(wcm_weight_pmf(y, y, 0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(wcm_weight_pmf(y, y, 1) == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(wcm_weight_pmf(0, 0.3, 0) == 1.0);
    CHECK_THROWS_AS(wcm_weight_pmf(1.0, 0.3, 0), DomainError);
}

TEST_CASE("gdp-driven pair quantities") {
    CHECK(gdp_link_probability(1.0 / 3, 1.0 / 3, {9, 1, 1}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gdp_link_probability(1, 1, {1, 1, 1}) == 0.5);
    CHECK(gdp_link_probability(1e-12, 1e-12, {50, 1, 1}) < 1e-20);
    CHECK(gdp_expected_weight(1, 1, {1, 1, 1}) == doctest::Approx(0.5 * 4.0 / 3.0).epsilon(1e-14));
    CHECK(gdp_expected_weight(0.2, 0.3, {4, 1e-14, 1}) == doctest::Approx(gdp_link_probability(0.2, 0.3, {4, 1, 1})));
    CHECK_THROWS_AS(gdp_link_probability(0.0, 0.5, {1, 1, 1}), DomainError);
}

TEST_CASE("gdp expressions equal the two-step ones with z = sqrt(a) g and y = b g^c / (1 + b g^c)") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        const GdpModelParams p{std::exp(8 * u(rng) - 2), std::exp(6 * u(rng) - 3), 0.1 + 2 * u(rng)};
        const double gi = std::exp(-8 * u(rng));
        const double gj = std::exp(-8 * u(rng));
        const double zi = std::sqrt(p.a) * gi, zj = std::sqrt(p.a) * gj;
        const double oi = p.b * std::pow(gi, p.c), oj = p.b * std::pow(gj, p.c);
        const double yi = oi / (1 + oi), yj = oj / (1 + oj);
        CHECK(std::abs(gdp_link_probability(gi, gj, p) - ts_link_probability(zi, zj)) <= 1e-12);
        const double wt = ts_expected_weight(zi, zj, yi, yj);
        CHECK(std::abs(gdp_expected_weight(gi, gj, p) - wt) <= 1e-12 * std::max(1.0, wt));
    }
}

TEST_CASE("ecm probability with gdp-driven multipliers") {
    // x = sqrt(a) g and y from the logistic law plugged into the ECM formula
    // matches the closed form written in terms of (a, b, c).
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const GdpModelParams p{std::exp(6 * u(rng)), std::exp(4 * u(rng) - 2), 0.2 + u(rng)};
        const double gi = 0.5 * u(rng) + 1e-3, gj = 0.5 * u(rng) + 1e-3;
        const double oi = p.b * std::pow(gi, p.c), oj = p.b * std::pow(gj, p.c);
        const double xi = std::sqrt(p.a) * gi, xj = std::sqrt(p.a) * gj;
        const double yi = oi / (1 + oi), yj = oj / (1 + oj);
        const double t_num = p.a * gi * gj * oi * oj;
        const double closed = t_num / ((1 + oi + oj) + t_num);
        CHECK(ecm_link_probability(xi, xj, yi, yj) == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("two-step pmf normalises and its mean is the expected weight") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const double zi = std::exp(6 * u(rng) - 3), zj = std::exp(6 * u(rng) - 3);
        const double yi = 0.999 * u(rng), yj = 0.999 * u(rng);
        const auto m = ts_moments_by_summation(zi, zj, yi, yj);
        CHECK(std::abs(m.mass - 1.0) <= 1e-12);
        const double expected = ts_expected_weight(zi, zj, yi, yj);
        CHECK(std::abs(m.mean - expected) <= 1e-10 * std::max(1.0, expected));
    }
}

TEST_CASE("two-step pmf reduces to the geometric law on the neutral boundary") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int t = 0; t < 100; ++t) {
        const double yi = u(rng), yj = u(rng);
        const double q = yi * yj;
        const double zz = q / (1 - q);  // zz (1 - q) / q = 1
        const double zi = std::sqrt(zz), zj = std::sqrt(zz);
        for (std::int64_t w = 0; w <= 50; ++w)
            CHECK(std::abs(ts_weight_pmf(zi, zj, yi, yj, w) - wcm_weight_pmf(yi, yj, w)) <= 1e-12);
    }
}

TEST_CASE("pair functions are symmetric and probabilities lie in [0,1)") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const double xi = std::exp(10 * u(rng) - 5), xj = std::exp(10 * u(rng) - 5);
        const double yi = u(rng) * 0.999999, yj = u(rng) * 0.999999;
        const double p = ecm_link_probability(xi, xj, yi, yj);
        CHECK(p >= 0.0);
        CHECK(p < 1.0);
        CHECK(p == ecm_link_probability(xj, xi, yj, yi));
        CHECK(ecm_expected_weight(xi, xj, yi, yj) >= p);
        CHECK(ecm_expected_weight(xi, xj, yi, yj) == ecm_expected_weight(xj, xi, yj, yi));
        const double b = bcm_link_probability(xi, xj);
        CHECK(b >= 0.0);
        CHECK(b < 1.0);
        CHECK(b == bcm_link_probability(xj, xi));
        CHECK(ts_weight_pmf(xi, xj, yi, yj, 3) == ts_weight_pmf(xj, xi, yj, yi, 3));
        CHECK(wcm_weight_pmf(yi, yj, 2) == wcm_weight_pmf(yj, yi, 2));
        const GdpModelParams gp{std::exp(5 * u(rng)), 1.0 + u(rng), 0.5 + u(rng)};
        const double gi = 0.01 + 0.99 * u(rng), gj = 0.01 + 0.99 * u(rng);
        CHECK(gdp_link_probability(gi, gj, gp) == gdp_link_probability(gj, gi, gp));
        CHECK(gdp_expected_weight(gi, gj, gp) == doctest::Approx(gdp_expected_weight(gj, gi, gp)).epsilon(1e-15));
    }
}

TEST_CASE("stable evaluation near y y -> 1") {
    const double y = std::sqrt(1.0 - 1e-13);
    const double p = ecm_link_probability(1e-3, 1e-3, y, y);
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(std::isfinite(ecm_expected_weight(1e-3, 1e-3, y, y)));
}

TEST_CASE("pair friction classification") {
    // p = 0.6 against y_i y_j = 0.3
    CHECK(classify_pair_friction(0.6, std::sqrt(0.3), std::sqrt(0.3)) == PairFriction::EasyLinkHardGrowth);
    CHECK(classify_pair_friction(0.1, std::sqrt(0.5), std::sqrt(0.5)) == PairFriction::HardLinkEasyGrowth);
    const double y = std::sqrt(0.5);
    CHECK(classify_pair_friction(ts_link_probability(1, 1), y, y) == PairFriction::WcmNeutral);
    CHECK_THROWS_AS(classify_pair_friction(0.3, 0.0, 0.5), DomainError);
    CHECK(to_string(PairFriction::WcmNeutral) == "WCM_NEUTRAL");
}

TEST_CASE("probability matrices") {
    const TsSolution ts{Vector::Constant(4, 1 / std::sqrt(2.0)), Vector::Constant(4, 0.3)};
    const Matrix p = ts_probability_matrix(ts);
    CHECK(p.diagonal().isZero());
    CHECK((p - p.transpose()).isZero());
    CHECK(p(0, 3) == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(ts_probability_matrix(TsSolution{Vector::Ones(2), Vector::Constant(2, 1.0)}), DomainError);

    const FitnessVector f{Vector::Constant(3, 1.0 / 3), Vector::Ones(3)};
    const Matrix pg = gdp_probability_matrix(f, {9, 1, 1});
    CHECK(pg(0, 1) == doctest::Approx(0.5));
    const TsSolution from_gdp = ts_from_gdp(f, {9, 2, 1});
    CHECK(from_gdp.z[0] == doctest::Approx(1.0));
    CHECK(from_gdp.y[0] == doctest::Approx((2.0 / 3) / (1 + 2.0 / 3)));
}
