#pragma once

// Closed-form pair quantities of the binary, weighted, enhanced and two-step
// configuration models, plus their GDP-driven specialisation.
//
// Every pairwise function is symmetric in (i, j). Multipliers y must lie in
// [0, 1); values at or above 1 are rejected, never clamped.

#include <cstdint>
#include <string_view>

#include "itn/trade_data.hpp"

namespace itn {

/// Largest y_i * y_j used inside evaluation.
inline constexpr double kMaxYProduct = 1.0 - 1e-12;
/// Value stored for a node whose y multiplier sits at its zero boundary while
/// its x multiplier still matters (ECM nodes with s_i == k_i).
inline constexpr double kYFloor = 1e-12;

struct EcmSolution {
    Vector x;
    Vector y;
    std::size_t size() const noexcept { return static_cast<std::size_t>(x.size()); }
};

struct BcmSolution {
    Vector z;
    std::size_t size() const noexcept { return static_cast<std::size_t>(z.size()); }
};

struct WcmSolution {
    Vector y;
    std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
};

/// Two-step model: z from the degree-only step, y from the strength step.
struct TsSolution {
    Vector z;
    Vector y;
    std::size_t size() const noexcept { return static_cast<std::size_t>(z.size()); }
};

struct GdpModelParams {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

void validate(const EcmSolution& s);
void validate(const BcmSolution& s);
void validate(const WcmSolution& s);
void validate(const TsSolution& s);
void validate(const GdpModelParams& p);

double ecm_link_probability(double x_i, double x_j, double y_i, double y_j);
double ecm_expected_weight(double x_i, double x_j, double y_i, double y_j);

double bcm_link_probability(double z_i, double z_j);

double ts_link_probability(double z_i, double z_j);
double ts_expected_weight(double z_i, double z_j, double y_i, double y_j);
/// q(w) = (zz)^a (yy)^(w-a) (1-yy)^a / (1+zz), a = Theta[w].
double ts_weight_pmf(double z_i, double z_j, double y_i, double y_j, std::int64_t w);

/// Geometric law (yy)^w (1-yy).
double wcm_weight_pmf(double y_i, double y_j, std::int64_t w);
double wcm_expected_weight(double y_i, double y_j);

double gdp_link_probability(double g_i, double g_j, const GdpModelParams& params);
double gdp_expected_weight(double g_i, double g_j, const GdpModelParams& params);

/// z_i = sqrt(a) g_i and y_i = b g_i^c / (1 + b g_i^c).
TsSolution ts_from_gdp(const FitnessVector& fitness, const GdpModelParams& params);

enum class PairFriction { EasyLinkHardGrowth, HardLinkEasyGrowth, WcmNeutral };

std::string_view to_string(PairFriction f);

/// Compares p / (y_i y_j) with one, `relative_eps` wide band counts as neutral.
PairFriction classify_pair_friction(double p_ts, double y_i, double y_j, double relative_eps = 1e-9);

// Dense n x n matrices with zero diagonals.
Matrix ecm_probability_matrix(const EcmSolution& s);
Matrix ecm_weight_matrix(const EcmSolution& s);
Matrix bcm_probability_matrix(const BcmSolution& s);
Matrix ts_probability_matrix(const TsSolution& s);
Matrix ts_weight_matrix(const TsSolution& s);
/// P(w_ij >= 1) = y_i y_j under the WCM.
Matrix wcm_probability_matrix(const WcmSolution& s);
Matrix wcm_weight_matrix(const WcmSolution& s);
Matrix gdp_probability_matrix(const FitnessVector& f, const GdpModelParams& params);
Matrix gdp_weight_matrix(const FitnessVector& f, const GdpModelParams& params);

}  // namespace itn
