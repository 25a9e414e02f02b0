#pragma once

// Independent-pair network sampling for the canonical ensembles.
//
// Every pair (i < j) of every sample owns a SplitMix64 stream keyed by
// (seed, sample_index, i, j), so a realization does not depend on the order or
// thread in which pairs are generated.

#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>

#include "itn/maxent_models.hpp"
#include "itn/trade_data.hpp"

namespace itn {

enum class SampledModel { TS, GdpDriven, WCM, BCM };

std::string_view to_string(SampledModel m);

struct SampleConfig {
    std::uint64_t n_samples = 1;
    std::uint64_t seed = 0;
    SampledModel model = SampledModel::TS;
};

/// SplitMix64 generator; `uniform()` returns values in (0, 1].
class PairStream {
public:
    PairStream(std::uint64_t seed, std::uint64_t sample, std::uint64_t i, std::uint64_t j);
    explicit PairStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next();
    double uniform();

private:
    std::uint64_t state_;
};

/// Number of failures before the first stop, P(m) = q^m (1 - q); inverse CDF.
std::int64_t draw_geometric(double q, double u);

struct GdpDriven {
    FitnessVector fitness;
    GdpModelParams params;
};

/// Model parameters accepted by the sampler.
using SamplerParams = std::variant<TsSolution, GdpDriven, WcmSolution, BcmSolution>;

SampledModel model_of(const SamplerParams& params);

/// Two-stage draw: Bernoulli(p_ij) link, then 1 + Geometric(y_i y_j) weight.
WeightedNetwork sample_network(const TsSolution& sol, std::uint64_t seed, std::uint64_t sample_index = 0);
WeightedNetwork sample_network(const GdpDriven& model, std::uint64_t seed, std::uint64_t sample_index = 0);
/// Binary draw, unit weights.
WeightedNetwork sample_bcm_network(const BcmSolution& sol, std::uint64_t seed, std::uint64_t sample_index = 0);
/// Weight drawn directly from (y_i y_j)^w (1 - y_i y_j), w >= 0.
WeightedNetwork sample_wcm_network(const WcmSolution& sol, std::uint64_t seed, std::uint64_t sample_index = 0);

WeightedNetwork sample_any(const SamplerParams& params, std::uint64_t seed, std::uint64_t sample_index);

/// Welford accumulator over a fixed-shape array of values. NaN observations
/// are skipped entry-wise.
class RunningMoments {
public:
    RunningMoments() = default;
    RunningMoments(Eigen::Index rows, Eigen::Index cols);

    void add(const Matrix& values);
    /// Chan et al. pairwise merge.
    void merge(const RunningMoments& other);

    const Matrix& mean() const noexcept { return mean_; }
    Matrix count() const { return count_; }
    /// Unbiased variance; zero where fewer than two observations exist.
    Matrix variance() const;
    /// sqrt(variance / count).
    Matrix std_error() const;

private:
    Matrix count_;
    Matrix mean_;
    Matrix m2_;
};

struct EnsembleStats {
    std::uint64_t n_samples = 0;
    SampledModel model = SampledModel::TS;
    /// Per pair.
    Matrix mean_adjacency;
    Matrix se_adjacency;
    Matrix mean_weight;
    Matrix se_weight;
    /// Per node. knn, snn and clustering average only samples where defined;
    /// the *_count vectors hold how many samples that was.
    Vector mean_k, se_k, mean_s, se_s;
    Vector mean_knn, se_knn, knn_count;
    Vector mean_snn, se_snn;
    Vector mean_clustering, se_clustering, clustering_count;
    double mean_L = 0.0, se_L = 0.0, mean_W = 0.0, se_W = 0.0;
    /// True when n_samples == 1 (standard errors are reported as 0).
    bool zero_variance = false;
};

using RealizationSink = std::function<void(std::uint64_t sample_index, const WeightedNetwork&)>;

/// Streams cfg.n_samples realizations; deterministic in (params, seed, n_samples).
/// `cfg.model` must match the parameter alternative.
EnsembleStats sample_ensemble(const SamplerParams& params, const SampleConfig& cfg, const RealizationSink& sink = {});

}  // namespace itn
