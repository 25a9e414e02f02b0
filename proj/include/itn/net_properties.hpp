#pragma once

// First- and second-order node statistics: degree, strength, average
// nearest-neighbour degree and strength, and the binary clustering
// coefficient, both measured on a network and expected under a model.
//
// Undefined entries (knn and snn for k = 0, clustering for k < 2) are NaN.

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "itn/maxent_models.hpp"
#include "itn/trade_data.hpp"

namespace itn {

struct PropertyVector {
    Vector k;
    Vector s;
    Vector knn;
    Vector snn;
    Vector clustering;
    double L = 0.0;
    double W = 0.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(k.size()); }
};

/// Same layout; entries are model expectations.
using ExpectedPropertyVector = PropertyVector;

inline bool is_absent(double v) { return std::isnan(v); }

PropertyVector empirical_properties(const WeightedNetwork& net);

/// Plug-in expectations from a probability matrix `p` and an expected weight
/// matrix `w`. knn and snn average `k_ref` and `s_ref` over partners and divide
/// by `k_norm`.
ExpectedPropertyVector expected_properties(const Matrix& p, const Matrix& w, const Vector& k_ref,
                                           const Vector& s_ref, const Vector& k_norm);

/// Uses observed k_j, s_j in the neighbour averages and divides by observed k_i.
ExpectedPropertyVector expected_properties_ecm(const EcmSolution& sol, const NetworkSummary& observed);
/// Uses the model's own <k_j>, <s_j> and divides by <k_i>.
ExpectedPropertyVector expected_properties_ts(const TsSolution& sol);
ExpectedPropertyVector expected_properties_gdp(const FitnessVector& g, const GdpModelParams& params);

/// Expected clustering only: sum_jk p_ij p_jk p_ki / sum_jk p_ij p_ik.
Vector expected_clustering(const Matrix& p);

inline constexpr std::array<std::string_view, 5> kStatisticNames{"k", "s", "knn", "snn", "c"};

struct StatisticSummary {
    std::string name;
    /// sqrt(mean (obs - exp)^2) / sqrt(mean obs^2); absolute RMSE when obs are all zero.
    double relative_rmse = 0.0;
    double rmse = 0.0;
    /// Spearman rank correlation, NaN with fewer than 2 usable nodes or no spread.
    double spearman = 0.0;
    std::size_t used = 0;
};

struct ComparisonTable {
    PropertyVector observed;
    ExpectedPropertyVector expected;
    std::vector<StatisticSummary> summary;  // ordered as kStatisticNames

    const StatisticSummary& stat(std::string_view name) const;
};

/// Nodes where either side is absent are skipped per statistic.
ComparisonTable compare_reports(const PropertyVector& observed, const ExpectedPropertyVector& expected);

/// Spearman correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Plot-ready columns: node_id,g,k_obs,k_exp,s_obs,s_exp,knn_obs,knn_exp,snn_obs,snn_exp,c_obs,c_exp.
/// Absent values are written as `nan`.
void write_comparison_csv(std::ostream& out, const ComparisonTable& table, const std::vector<std::string>& node_ids,
                          const Vector& g);

}  // namespace itn
