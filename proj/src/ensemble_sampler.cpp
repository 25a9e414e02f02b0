#include "itn/ensemble_sampler.hpp"

#include <cmath>
#include <limits>

#include "itn/errors.hpp"
#include "itn/net_properties.hpp"

namespace itn {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Draws every pair from `draw(stream, i, j)`.
template <typename Draw>
WeightedNetwork sample_pairs(Eigen::Index n, std::uint64_t seed, std::uint64_t sample, Draw&& draw) {
    WeightMatrix w = WeightMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            PairStream stream(seed, sample, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
            w(i, j) = w(j, i) = draw(stream, i, j);
        }
    return WeightedNetwork(std::move(w));
}

std::int64_t two_stage(PairStream& stream, double p, double q) {
    if (!(stream.uniform() <= p) || p == 0.0) return 0;
    return 1 + draw_geometric(q, stream.uniform());
}

}  // namespace

std::string_view to_string(SampledModel m) {
    switch (m) {
        case SampledModel::TS: return "ts";
        case SampledModel::GdpDriven: return "gdp";
        case SampledModel::WCM: return "wcm";
        case SampledModel::BCM: return "bcm";
    }
    return "?";
}

PairStream::PairStream(std::uint64_t seed, std::uint64_t sample, std::uint64_t i, std::uint64_t j) {
    std::uint64_t key = mix64(seed + kGolden);
    key = mix64(key ^ (sample + 0x632BE59BD9B4E019ULL));
    key = mix64(key ^ (i * 0xD1B54A32D192ED03ULL + 1));
    key = mix64(key ^ (j * 0x8CB92BA72F3D8DD7ULL + 2));
    state_ = key;
}

std::uint64_t PairStream::next() {
    state_ += kGolden;
    return mix64(state_);
}

double PairStream::uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

std::int64_t draw_geometric(double q, double u) {
    if (!(q >= 0.0 && q < 1.0)) throw DomainError("draw_geometric: q must lie in [0,1)");
    if (q == 0.0) return 0;
    // P(X >= m) = q^m, so X = floor(log u / log q) for u in (0,1].
    const double m = std::floor(std::log(u) / std::log(q));
    if (!(m < 9.0e18)) return std::numeric_limits<std::int64_t>::max() / 4;
    return static_cast<std::int64_t>(m);
}

SampledModel model_of(const SamplerParams& params) {
    switch (params.index()) {
        case 0: return SampledModel::TS;
        case 1: return SampledModel::GdpDriven;
        case 2: return SampledModel::WCM;
        default: return SampledModel::BCM;
    }
}

WeightedNetwork sample_network(const TsSolution& sol, std::uint64_t seed, std::uint64_t sample_index) {
    validate(sol);
    return sample_pairs(sol.z.size(), seed, sample_index, [&](PairStream& st, Eigen::Index i, Eigen::Index j) {
        return two_stage(st, ts_link_probability(sol.z[i], sol.z[j]), std::min(sol.y[i] * sol.y[j], kMaxYProduct));
    });
}

WeightedNetwork sample_network(const GdpDriven& model, std::uint64_t seed, std::uint64_t sample_index) {
    return sample_network(ts_from_gdp(model.fitness, model.params), seed, sample_index);
}

WeightedNetwork sample_bcm_network(const BcmSolution& sol, std::uint64_t seed, std::uint64_t sample_index) {
    validate(sol);
    return sample_pairs(sol.z.size(), seed, sample_index, [&](PairStream& st, Eigen::Index i, Eigen::Index j) {
        return two_stage(st, bcm_link_probability(sol.z[i], sol.z[j]), 0.0);
    });
}

WeightedNetwork sample_wcm_network(const WcmSolution& sol, std::uint64_t seed, std::uint64_t sample_index) {
    validate(sol);
    return sample_pairs(sol.y.size(), seed, sample_index, [&](PairStream& st, Eigen::Index i, Eigen::Index j) {
        return draw_geometric(std::min(sol.y[i] * sol.y[j], kMaxYProduct), st.uniform());
    });
}

WeightedNetwork sample_any(const SamplerParams& params, std::uint64_t seed, std::uint64_t sample_index) {
    switch (params.index()) {
        case 0: return sample_network(std::get<TsSolution>(params), seed, sample_index);
        case 1: return sample_network(std::get<GdpDriven>(params), seed, sample_index);
        case 2: return sample_wcm_network(std::get<WcmSolution>(params), seed, sample_index);
        default: return sample_bcm_network(std::get<BcmSolution>(params), seed, sample_index);
    }
}

RunningMoments::RunningMoments(Eigen::Index rows, Eigen::Index cols)
    : count_(Matrix::Zero(rows, cols)), mean_(Matrix::Zero(rows, cols)), m2_(Matrix::Zero(rows, cols)) {}

void RunningMoments::add(const Matrix& values) {
    if (values.rows() != mean_.rows() || values.cols() != mean_.cols())
        throw DomainError("RunningMoments::add: shape mismatch");
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        for (Eigen::Index r = 0; r < values.rows(); ++r) {
            const double v = values(r, c);
            if (std::isnan(v)) continue;
            const double n = count_(r, c) += 1.0;
            const double delta = v - mean_(r, c);
            mean_(r, c) += delta / n;
            m2_(r, c) += delta * (v - mean_(r, c));
        }
}

void RunningMoments::merge(const RunningMoments& other) {
    if (other.mean_.rows() != mean_.rows() || other.mean_.cols() != mean_.cols())
        throw DomainError("RunningMoments::merge: shape mismatch");
    for (Eigen::Index c = 0; c < mean_.cols(); ++c)
        for (Eigen::Index r = 0; r < mean_.rows(); ++r) {
            const double na = count_(r, c);
            const double nb = other.count_(r, c);
            if (nb == 0.0) continue;
            const double n = na + nb;
            const double delta = other.mean_(r, c) - mean_(r, c);
            mean_(r, c) += delta * nb / n;
            m2_(r, c) += other.m2_(r, c) + delta * delta * na * nb / n;
            count_(r, c) = n;
        }
}

Matrix RunningMoments::variance() const {
    Matrix v = Matrix::Zero(mean_.rows(), mean_.cols());
    for (Eigen::Index c = 0; c < v.cols(); ++c)
        for (Eigen::Index r = 0; r < v.rows(); ++r)
            if (count_(r, c) > 1.0) v(r, c) = m2_(r, c) / (count_(r, c) - 1.0);
    return v;
}

Matrix RunningMoments::std_error() const {
    Matrix v = variance();
    for (Eigen::Index c = 0; c < v.cols(); ++c)
        for (Eigen::Index r = 0; r < v.rows(); ++r)
            v(r, c) = count_(r, c) > 0.0 ? std::sqrt(v(r, c) / count_(r, c)) : 0.0;
    return v;
}

EnsembleStats sample_ensemble(const SamplerParams& params, const SampleConfig& cfg, const RealizationSink& sink) {
    if (cfg.n_samples == 0) throw DomainError("sample_ensemble: n_samples must be at least 1");
    if (cfg.model != model_of(params)) throw DomainError("sample_ensemble: config model does not match parameters");

    Eigen::Index n = 0;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GdpDriven>) n = p.fitness.g.size();
            else if constexpr (std::is_same_v<T, TsSolution> || std::is_same_v<T, BcmSolution>) n = p.z.size();
            else n = p.y.size();
        },
        params);

    RunningMoments adjacency(n, n), weight(n, n), node(n, 5), totals(2, 1);
    for (std::uint64_t sample = 0; sample < cfg.n_samples; ++sample) {
        const WeightedNetwork net = sample_any(params, cfg.seed, sample);
        if (sink) sink(sample, net);
        adjacency.add(net.adjacency());
        weight.add(net.weights_real());
        const PropertyVector props = empirical_properties(net);
        Matrix per_node(n, 5);
        per_node << props.k, props.s, props.knn, props.snn, props.clustering;
        node.add(per_node);
        Matrix t(2, 1);
        t << props.L, props.W;
        totals.add(t);
    }

    EnsembleStats st;
    st.n_samples = cfg.n_samples;
    st.model = cfg.model;
    st.zero_variance = cfg.n_samples == 1;
    st.mean_adjacency = adjacency.mean();
    st.se_adjacency = adjacency.std_error();
    st.mean_weight = weight.mean();
    st.se_weight = weight.std_error();
    const Matrix nm = node.mean();
    const Matrix ns = node.std_error();
    const Matrix nc = node.count();
    st.mean_k = nm.col(0);
    st.se_k = ns.col(0);
    st.mean_s = nm.col(1);
    st.se_s = ns.col(1);
    st.knn_count = nc.col(2);
    st.mean_knn = nm.col(2);
    st.se_knn = ns.col(2);
    st.mean_snn = nm.col(3);
    st.se_snn = ns.col(3);
    st.clustering_count = nc.col(4);
    st.mean_clustering = nm.col(4);
    st.se_clustering = ns.col(4);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (st.knn_count[i] == 0.0) st.mean_knn[i] = st.mean_snn[i] = std::numeric_limits<double>::quiet_NaN();
        if (st.clustering_count[i] == 0.0) st.mean_clustering[i] = std::numeric_limits<double>::quiet_NaN();
    }
    st.mean_L = totals.mean()(0, 0);
    st.mean_W = totals.mean()(1, 0);
    st.se_L = totals.std_error()(0, 0);
    st.se_W = totals.std_error()(1, 0);
    return st;
}

}  // namespace itn
