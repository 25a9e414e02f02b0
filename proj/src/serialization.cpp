#include "itn/serialization.hpp"

#include <cmath>
#include <limits>

#include "itn/errors.hpp"

namespace itn {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) throw ValidationError("expected a JSON array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from(j[i]);
    return v;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
    return out;
}

std::string_view to_string(PairConvention c) { return c == PairConvention::Ordered ? "ordered" : "unordered"; }

PairConvention pair_convention_from_string(std::string_view s) {
    if (s == "ordered") return PairConvention::Ordered;
    if (s == "unordered") return PairConvention::Unordered;
    throw ValidationError("unknown pair convention '" + std::string(s) + "'");
}

std::string_view to_string(Initialization i) { return i == Initialization::Uniform ? "uniform" : "degree_seeded"; }

Initialization initialization_from_string(std::string_view s) {
    if (s == "uniform") return Initialization::Uniform;
    if (s == "degree_seeded") return Initialization::DegreeSeeded;
    throw ValidationError("unknown initialization '" + std::string(s) + "'");
}

json to_json(const SolverConfig& cfg) {
    return json{{"max_iterations", cfg.max_iterations},
                {"tolerance", cfg.tolerance},
                {"damping", cfg.damping},
                {"initialization", to_string(cfg.initialization)},
                {"fixed_point_sweeps", cfg.fixed_point_sweeps},
                {"slow_ratio", cfg.slow_ratio}};
}

SolverConfig solver_config_from_json(const json& j) {
    SolverConfig cfg;
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.damping = j.value("damping", cfg.damping);
    if (j.contains("initialization")) cfg.initialization = initialization_from_string(j["initialization"].get<std::string>());
    cfg.fixed_point_sweeps = j.value("fixed_point_sweeps", cfg.fixed_point_sweeps);
    cfg.slow_ratio = j.value("slow_ratio", cfg.slow_ratio);
    cfg.validate();
    return cfg;
}

json to_json(const SolveReport& r, bool include_trace) {
    json deg = json::array();
    for (const auto& d : r.degenerate_nodes) deg.push_back({{"node", d.node}, {"reason", d.reason}});
    json out{{"converged", r.converged},
             {"iterations_used", r.iterations_used},
             {"fixed_point_sweeps", r.fixed_point_sweeps},
             {"newton_steps", r.newton_steps},
             {"final_residual", number(r.final_residual)},
             {"degenerate_nodes", std::move(deg)}};
    if (include_trace) {
        json trace = json::array();
        for (double v : r.residual_trace) trace.push_back(number(v));
        out["residual_trace"] = std::move(trace);
    }
    return out;
}

json to_json(const DensityFit& f) {
    return json{{"a", f.a},
                {"achieved_L", f.achieved_L},
                {"target_L", f.target_L},
                {"residual", f.residual},
                {"pair_convention", to_string(f.convention)},
                {"boundary", f.boundary}};
}

json to_json(const SlopeFit& f) {
    return json{{"sqrt_a", f.sqrt_a},
                {"std_error", f.std_error},
                {"r_squared", number(f.r_squared)},
                {"used", f.used},
                {"excluded", f.excluded}};
}

json to_json(const LogitFit& f) {
    return json{{"b", f.b},
                {"c", f.c},
                {"log_b_std_error", f.log_b_std_error},
                {"c_std_error", f.c_std_error},
                {"r_squared", number(f.r_squared)},
                {"used", f.used},
                {"excluded", f.excluded}};
}

json to_json(const FitnessFit& f) {
    return json{{"sqrt_a", f.sqrt_a},
                {"b", f.b},
                {"c", f.c},
                {"r_squared_x", number(f.r_squared_x)},
                {"r_squared_y", number(f.r_squared_y)},
                {"x_fit", to_json(f.x_fit)},
                {"y_fit", to_json(f.y_fit)}};
}

json to_json(const LogNormalFit& f, bool include_ccdf) {
    json out{{"mu", f.mu}, {"sigma", f.sigma}, {"degenerate", f.degenerate}, {"n", f.n}};
    if (include_ccdf) {
        json curve = json::array();
        for (const auto& [v, p] : f.ccdf) curve.push_back({v, p});
        out["ccdf"] = std::move(curve);
    }
    return out;
}

json to_json(const GdpModelParams& p) { return json{{"a", p.a}, {"b", p.b}, {"c", p.c}}; }

json to_json(const NetworkSummary& s) {
    return json{{"n", s.n}, {"L", s.link_count}, {"W", s.total_weight}, {"degree", s.degree}, {"strength", s.strength}};
}

json to_json(const EnsembleStats& st) {
    return json{{"model", to_string(st.model)},
                {"n_samples", st.n_samples},
                {"zero_variance", st.zero_variance},
                {"mean_L", number(st.mean_L)},
                {"se_L", number(st.se_L)},
                {"mean_W", number(st.mean_W)},
                {"se_W", number(st.se_W)},
                {"mean_k", vector_to_json(st.mean_k)},
                {"se_k", vector_to_json(st.se_k)},
                {"mean_s", vector_to_json(st.mean_s)},
                {"se_s", vector_to_json(st.se_s)},
                {"mean_knn", vector_to_json(st.mean_knn)},
                {"se_knn", vector_to_json(st.se_knn)},
                {"knn_count", vector_to_json(st.knn_count)},
                {"mean_snn", vector_to_json(st.mean_snn)},
                {"se_snn", vector_to_json(st.se_snn)},
                {"mean_clustering", vector_to_json(st.mean_clustering)},
                {"se_clustering", vector_to_json(st.se_clustering)},
                {"clustering_count", vector_to_json(st.clustering_count)}};
}

json solution_to_json(const ModelSolution& sol) {
    json out{{"model", sol.model}, {"node_ids", sol.node_ids}};
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BcmSolution>) {
                out["z"] = vector_to_json(p.z);
            } else if constexpr (std::is_same_v<T, WcmSolution>) {
                out["y"] = vector_to_json(p.y);
            } else if constexpr (std::is_same_v<T, EcmSolution>) {
                out["x"] = vector_to_json(p.x);
                out["y"] = vector_to_json(p.y);
            } else if constexpr (std::is_same_v<T, TsSolution>) {
                out["z"] = vector_to_json(p.z);
                out["y"] = vector_to_json(p.y);
            } else {
                out["params"] = to_json(p);
            }
        },
        sol.params);
    return out;
}

ModelSolution solution_from_json(const json& j) {
    ModelSolution sol;
    try {
        sol.model = j.at("model").get<std::string>();
        if (j.contains("node_ids")) sol.node_ids = j["node_ids"].get<std::vector<std::string>>();
        if (sol.model == "bcm") {
            sol.params = BcmSolution{vector_from_json(j.at("z"))};
        } else if (sol.model == "wcm") {
            sol.params = WcmSolution{vector_from_json(j.at("y"))};
        } else if (sol.model == "ecm") {
            sol.params = EcmSolution{vector_from_json(j.at("x")), vector_from_json(j.at("y"))};
        } else if (sol.model == "ts") {
            sol.params = TsSolution{vector_from_json(j.at("z")), vector_from_json(j.at("y"))};
        } else if (sol.model == "gdp") {
            const auto& p = j.at("params");
            sol.params = GdpModelParams{p.at("a").get<double>(), p.at("b").get<double>(), p.at("c").get<double>()};
        } else {
            throw ValidationError("unknown model '" + sol.model + "' in solution document");
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed solution document: ") + e.what());
    }
    std::visit([](const auto& p) { validate(p); }, sol.params);
    return sol;
}

}  // namespace itn
