#pragma once

// Maximum-likelihood solvers for the configuration-model constraint systems.
//
// Each solve starts with damped multiplicative fixed-point sweeps in log
// variables (Gauss-Seidel order) and switches to Newton's method on the convex
// negative log-likelihood once the sweeps stall. Residuals are relative:
// |expected_i - observed_i| / max(observed_i, 1).

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "itn/maxent_models.hpp"
#include "itn/trade_data.hpp"

namespace itn {

enum class Initialization { Uniform, DegreeSeeded };

struct SolverConfig {
    std::size_t max_iterations = 100000;
    double tolerance = 1e-8;
    double damping = 0.5;
    Initialization initialization = Initialization::DegreeSeeded;
    /// Fixed-point sweeps allowed before Newton takes over.
    std::size_t fixed_point_sweeps = 200;
    /// Sweeps whose residual shrinks by less than this factor count as slow.
    double slow_ratio = 0.95;
    bool record_trace = false;

    void validate() const;
};

struct DegenerateNode {
    std::size_t node = 0;
    std::string reason;
};

struct SolveReport {
    std::size_t iterations_used = 0;
    std::size_t fixed_point_sweeps = 0;
    std::size_t newton_steps = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<DegenerateNode> degenerate_nodes;
    std::vector<double> residual_trace;
};

std::pair<BcmSolution, SolveReport> solve_bcm(const NetworkSummary& summary, const SolverConfig& cfg = {});
std::pair<WcmSolution, SolveReport> solve_wcm(const NetworkSummary& summary, const SolverConfig& cfg = {});
/// Nodes with s_i == k_i > 0 end with y_i = kYFloor and x_i y_i at its
/// finite limit.
std::pair<EcmSolution, SolveReport> solve_ecm(const NetworkSummary& summary, const SolverConfig& cfg = {});
/// BCM step for z, then y matching s_i = sum_j p_ij / (1 - y_i y_j).
std::pair<TsSolution, SolveReport> solve_ts(const NetworkSummary& summary, const SolverConfig& cfg = {});

/// max_i |sum_j p_ij - k_i| / max(k_i, 1).
double max_relative_residual(const Vector& expected, const Vector& observed);

}  // namespace itn
