#pragma once

// JSON documents for solver reports, fitted parameters and ensemble
// statistics. NaN values are written as null and read back as NaN.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "itn/ensemble_sampler.hpp"
#include "itn/gdp_calibration.hpp"
#include "itn/likelihood_solvers.hpp"
#include "itn/maxent_models.hpp"

namespace itn {

using json = nlohmann::ordered_json;

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);
json matrix_to_json(const Matrix& m);

json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const json& j);
json to_json(const SolveReport& report, bool include_trace = false);
json to_json(const DensityFit& fit);
json to_json(const SlopeFit& fit);
json to_json(const LogitFit& fit);
json to_json(const FitnessFit& fit);
json to_json(const LogNormalFit& fit, bool include_ccdf = false);
json to_json(const GdpModelParams& p);
json to_json(const NetworkSummary& s);
/// Per-node means only; pair matrices are written separately as CSV.
json to_json(const EnsembleStats& st);

std::string_view to_string(PairConvention c);
PairConvention pair_convention_from_string(std::string_view s);
std::string_view to_string(Initialization i);
Initialization initialization_from_string(std::string_view s);

/// A fitted model as stored in a solution document.
struct ModelSolution {
    std::string model;  // bcm | wcm | ecm | ts | gdp
    std::vector<std::string> node_ids;
    std::variant<BcmSolution, WcmSolution, EcmSolution, TsSolution, GdpModelParams> params;
};

json solution_to_json(const ModelSolution& sol);
ModelSolution solution_from_json(const json& j);

}  // namespace itn
