#include "itn/maxent_models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "itn/errors.hpp"

namespace itn {

namespace {

void check_y(double y, const char* where) {
    if (!(y >= 0.0 && y < 1.0)) throw DomainError(std::string(where) + ": y must lie in [0,1), got " + std::to_string(y));
}

void check_nonneg(double v, const char* name, const char* where) {
    if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError(std::string(where) + ": " + name + " must be finite and nonnegative, got " +
                          std::to_string(v));
}

void check_g(double g, const char* where) {
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError(std::string(where) + ": g must be positive, got " + std::to_string(g));
}

double capped_product(double y_i, double y_j) { return std::min(y_i * y_j, kMaxYProduct); }

// b g^c, the odds of the y multiplier in the GDP-driven model.
double y_odds(double g, const GdpModelParams& p) { return p.b * std::pow(g, p.c); }

template <typename Fn>
Matrix pair_matrix(Eigen::Index n, Fn&& fn) {
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = fn(i, j);
    return m;
}

}  // namespace

void validate(const EcmSolution& s) {
    if (s.x.size() != s.y.size()) throw DomainError("EcmSolution: x and y lengths differ");
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        check_nonneg(s.x[i], "x", "EcmSolution");
        check_y(s.y[i], "EcmSolution");
    }
}

void validate(const BcmSolution& s) {
    for (Eigen::Index i = 0; i < s.z.size(); ++i) check_nonneg(s.z[i], "z", "BcmSolution");
}

void validate(const WcmSolution& s) {
    for (Eigen::Index i = 0; i < s.y.size(); ++i) check_y(s.y[i], "WcmSolution");
}

void validate(const TsSolution& s) {
    if (s.z.size() != s.y.size()) throw DomainError("TsSolution: z and y lengths differ");
    for (Eigen::Index i = 0; i < s.z.size(); ++i) {
        check_nonneg(s.z[i], "z", "TsSolution");
        check_y(s.y[i], "TsSolution");
    }
}

void validate(const GdpModelParams& p) {
    for (double v : {p.a, p.b, p.c})
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("GdpModelParams: a, b, c must be positive");
}

double ecm_link_probability(double x_i, double x_j, double y_i, double y_j) {
    check_nonneg(x_i, "x_i", "ecm_link_probability");
    check_nonneg(x_j, "x_j", "ecm_link_probability");
    check_y(y_i, "ecm_link_probability");
    check_y(y_j, "ecm_link_probability");
    const double t = (x_i * y_i) * (x_j * y_j);
    if (t == 0.0) return 0.0;
    const double d = 1.0 - capped_product(y_i, y_j);
    return t / (d + t);
}

double ecm_expected_weight(double x_i, double x_j, double y_i, double y_j) {
    const double p = ecm_link_probability(x_i, x_j, y_i, y_j);
    return p / (1.0 - capped_product(y_i, y_j));
}

double bcm_link_probability(double z_i, double z_j) {
    check_nonneg(z_i, "z_i", "bcm_link_probability");
    check_nonneg(z_j, "z_j", "bcm_link_probability");
    const double zz = z_i * z_j;
    return zz / (1.0 + zz);
}

double ts_link_probability(double z_i, double z_j) { return bcm_link_probability(z_i, z_j); }

double ts_expected_weight(double z_i, double z_j, double y_i, double y_j) {
    check_y(y_i, "ts_expected_weight");
    check_y(y_j, "ts_expected_weight");
    return bcm_link_probability(z_i, z_j) / (1.0 - capped_product(y_i, y_j));
}

double ts_weight_pmf(double z_i, double z_j, double y_i, double y_j, std::int64_t w) {
    check_nonneg(z_i, "z_i", "ts_weight_pmf");
    check_nonneg(z_j, "z_j", "ts_weight_pmf");
    check_y(y_i, "ts_weight_pmf");
    check_y(y_j, "ts_weight_pmf");
    if (w < 0) throw DomainError("ts_weight_pmf: weight must be nonnegative");
    const double zz = z_i * z_j;
    if (w == 0) return 1.0 / (1.0 + zz);
    const double q = capped_product(y_i, y_j);
    return zz * std::pow(q, static_cast<double>(w - 1)) * (1.0 - q) / (1.0 + zz);
}

double wcm_weight_pmf(double y_i, double y_j, std::int64_t w) {
    check_y(y_i, "wcm_weight_pmf");
    check_y(y_j, "wcm_weight_pmf");
    if (w < 0) throw DomainError("wcm_weight_pmf: weight must be nonnegative");
    const double q = capped_product(y_i, y_j);
    return std::pow(q, static_cast<double>(w)) * (1.0 - q);
}

double wcm_expected_weight(double y_i, double y_j) {
    check_y(y_i, "wcm_expected_weight");
    check_y(y_j, "wcm_expected_weight");
    const double q = capped_product(y_i, y_j);
    return q / (1.0 - q);
}

double gdp_link_probability(double g_i, double g_j, const GdpModelParams& params) {
    check_g(g_i, "gdp_link_probability");
    check_g(g_j, "gdp_link_probability");
    if (!(params.a >= 0.0) || !std::isfinite(params.a)) throw DomainError("gdp_link_probability: a must be nonnegative");
    const double t = params.a * (g_i * g_j);
    return t / (1.0 + t);
}

double gdp_expected_weight(double g_i, double g_j, const GdpModelParams& params) {
    validate(params);
    const double p = gdp_link_probability(g_i, g_j, params);
    const double bi = y_odds(g_i, params);
    const double bj = y_odds(g_j, params);
    return p * (1.0 + bi) * (1.0 + bj) / (1.0 + bi + bj);
}

TsSolution ts_from_gdp(const FitnessVector& fitness, const GdpModelParams& params) {
    validate(params);
    const auto n = fitness.g.size();
    TsSolution s{Vector(n), Vector(n)};
    const double root_a = std::sqrt(params.a);
    for (Eigen::Index i = 0; i < n; ++i) {
        check_g(fitness.g[i], "ts_from_gdp");
        s.z[i] = root_a * fitness.g[i];
        const double odds = y_odds(fitness.g[i], params);
        s.y[i] = odds / (1.0 + odds);
    }
    return s;
}

std::string_view to_string(PairFriction f) {
    switch (f) {
        case PairFriction::EasyLinkHardGrowth: return "EASY_LINK_HARD_GROWTH";
        case PairFriction::HardLinkEasyGrowth: return "HARD_LINK_EASY_GROWTH";
        case PairFriction::WcmNeutral: return "WCM_NEUTRAL";
    }
    return "?";
}

PairFriction classify_pair_friction(double p_ts, double y_i, double y_j, double relative_eps) {
    check_y(y_i, "classify_pair_friction");
    check_y(y_j, "classify_pair_friction");
    if (!(p_ts >= 0.0 && p_ts <= 1.0)) throw DomainError("classify_pair_friction: p must lie in [0,1]");
    const double q = y_i * y_j;
    if (q == 0.0) throw DomainError("classify_pair_friction: ratio p/(y_i y_j) undefined for y_i y_j = 0");
    const double ratio = p_ts / q;
    if (ratio > 1.0 + relative_eps) return PairFriction::EasyLinkHardGrowth;
    if (ratio < 1.0 - relative_eps) return PairFriction::HardLinkEasyGrowth;
    return PairFriction::WcmNeutral;
}

Matrix ecm_probability_matrix(const EcmSolution& s) {
    validate(s);
    return pair_matrix(s.x.size(), [&](auto i, auto j) { return ecm_link_probability(s.x[i], s.x[j], s.y[i], s.y[j]); });
}

Matrix ecm_weight_matrix(const EcmSolution& s) {
    validate(s);
    return pair_matrix(s.x.size(), [&](auto i, auto j) { return ecm_expected_weight(s.x[i], s.x[j], s.y[i], s.y[j]); });
}

Matrix bcm_probability_matrix(const BcmSolution& s) {
    validate(s);
    return pair_matrix(s.z.size(), [&](auto i, auto j) { return bcm_link_probability(s.z[i], s.z[j]); });
}

Matrix ts_probability_matrix(const TsSolution& s) {
    validate(s);
    return pair_matrix(s.z.size(), [&](auto i, auto j) { return ts_link_probability(s.z[i], s.z[j]); });
}

Matrix ts_weight_matrix(const TsSolution& s) {
    validate(s);
    return pair_matrix(s.z.size(), [&](auto i, auto j) { return ts_expected_weight(s.z[i], s.z[j], s.y[i], s.y[j]); });
}

Matrix wcm_probability_matrix(const WcmSolution& s) {
    validate(s);
    return pair_matrix(s.y.size(), [&](auto i, auto j) { return capped_product(s.y[i], s.y[j]); });
}

Matrix wcm_weight_matrix(const WcmSolution& s) {
    validate(s);
    return pair_matrix(s.y.size(), [&](auto i, auto j) { return wcm_expected_weight(s.y[i], s.y[j]); });
}

Matrix gdp_probability_matrix(const FitnessVector& f, const GdpModelParams& params) {
    return pair_matrix(f.g.size(), [&](auto i, auto j) { return gdp_link_probability(f.g[i], f.g[j], params); });
}

Matrix gdp_weight_matrix(const FitnessVector& f, const GdpModelParams& params) {
    return pair_matrix(f.g.size(), [&](auto i, auto j) { return gdp_expected_weight(f.g[i], f.g[j], params); });
}

}  // namespace itn
