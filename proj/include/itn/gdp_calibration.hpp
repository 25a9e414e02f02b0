#pragma once

// Calibration of the GDP-driven two-step model: density fit for a, the
// through-origin x ~ g regression, the logit(y) ~ log g regression for (b, c),
// and the log-normal description of the rescaled GDP.

#include <cstddef>
#include <utility>
#include <vector>

#include "itn/maxent_models.hpp"
#include "itn/trade_data.hpp"

namespace itn {

/// How the double sum over node pairs is counted when matching L.
enum class PairConvention { Unordered, Ordered };

struct DensityFit {
    double a = 0.0;
    double achieved_L = 0.0;
    double target_L = 0.0;
    double residual = 0.0;  // achieved - target
    PairConvention convention = PairConvention::Unordered;
    /// target_L == 0 forces a = 0.
    bool boundary = false;
};

/// Expected link count sum a g_i g_j / (1 + a g_i g_j) under the convention.
double expected_link_count(const FitnessVector& g, double a, PairConvention convention = PairConvention::Unordered);

/// Root of a -> expected_link_count(a) - target_L (bracket by doubling, then
/// bisection), solved to |residual| <= 1e-9 * target_L.
DensityFit fit_density_a(const FitnessVector& g, double target_L,
                         PairConvention convention = PairConvention::Unordered);

struct SlopeFit {
    double sqrt_a = 0.0;
    double std_error = 0.0;
    /// Uncentred R^2 (no intercept in the model).
    double r_squared = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
};

/// Least squares through the origin of x against g. Nodes with x <= 0 or
/// non-finite x are excluded.
SlopeFit fit_sqrt_a(const Vector& x, const FitnessVector& g);

struct LogitFit {
    double b = 0.0;
    double c = 0.0;
    double log_b_std_error = 0.0;
    double c_std_error = 0.0;
    double r_squared = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
};

/// OLS of log(y/(1-y)) on log g: intercept log b, slope c. Nodes with y at
/// or below `y_floor` (ECM boundary nodes) or y >= 1 are excluded.
LogitFit fit_bc(const Vector& y, const FitnessVector& g, double y_floor = kYFloor);

struct FitnessFit {
    double sqrt_a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double r_squared_x = 0.0;
    double r_squared_y = 0.0;
    SlopeFit x_fit;
    LogitFit y_fit;
};

FitnessFit fit_fitness(const Vector& x, const Vector& y, const FitnessVector& g);

struct LogNormalFit {
    double mu = 0.0;
    double sigma = 0.0;
    bool degenerate = false;  // sigma == 0
    std::size_t n = 0;
    /// Empirical complementary cumulative curve: (value, fraction of values >= value), ascending.
    std::vector<std::pair<double, double>> ccdf;
};

/// mu and population sigma of log g_tilde.
LogNormalFit fit_lognormal(const std::vector<double>& g_tilde);
LogNormalFit fit_lognormal(const Vector& g_tilde);

/// P(X >= v) of the fitted log-normal.
double lognormal_ccdf(const LogNormalFit& fit, double value);

struct NodeExpectations {
    Vector degree;
    Vector strength;
};

NodeExpectations predict_expectations(const FitnessVector& g, const GdpModelParams& params);

/// <W> / W of the fitted model against an observed total weight.
double induced_weight_ratio(const FitnessVector& g, const GdpModelParams& params, double observed_W);

}  // namespace itn
