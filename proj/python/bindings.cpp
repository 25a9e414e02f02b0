#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "itn/ensemble_sampler.hpp"
#include "itn/errors.hpp"
#include "itn/gdp_calibration.hpp"
#include "itn/likelihood_solvers.hpp"
#include "itn/maxent_models.hpp"
#include "itn/net_properties.hpp"
#include "itn/serialization.hpp"
#include "itn/trade_data.hpp"

namespace py = pybind11;
using namespace itn;

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return in;
}

WeightedNetwork network_from(const WeightMatrix& w, std::vector<std::string> ids) {
    return WeightedNetwork(w, std::move(ids));
}

SolverConfig make_config(double tolerance, std::size_t max_iterations, double damping, const std::string& init) {
    SolverConfig cfg;
    cfg.tolerance = tolerance;
    cfg.max_iterations = max_iterations;
    cfg.damping = damping;
    cfg.initialization = initialization_from_string(init);
    cfg.validate();
    return cfg;
}

py::dict to_dict(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Maximum-entropy reconstruction of trade networks";

    auto base = py::register_exception<Error>(m, "ItnError");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());

    // ------------------------------------------------------------ data

    py::class_<FitnessVector>(m, "FitnessVector")
        .def_readonly("g", &FitnessVector::g)
        .def_readonly("g_tilde", &FitnessVector::g_tilde)
        .def("__len__", &FitnessVector::size);

    m.def("rescale_gdp", [](const std::vector<double>& gdp) { return rescale_gdp(std::span<const double>(gdp)); },
          py::arg("gdp"));

    py::class_<WeightedNetwork>(m, "WeightedNetwork")
        .def(py::init(&network_from), py::arg("weights"), py::arg("node_ids") = std::vector<std::string>{})
        .def_property_readonly("weights", &WeightedNetwork::weights)
        .def_property_readonly("node_ids", &WeightedNetwork::node_ids)
        .def("adjacency", &WeightedNetwork::adjacency)
        .def("__len__", &WeightedNetwork::size);

    py::class_<NetworkSummary>(m, "NetworkSummary")
        .def_readonly("n", &NetworkSummary::n)
        .def_readonly("L", &NetworkSummary::link_count)
        .def_readonly("W", &NetworkSummary::total_weight)
        .def_readonly("degree", &NetworkSummary::degree)
        .def_readonly("strength", &NetworkSummary::strength);

    m.def("summarize", &summarize, py::arg("network"));
    m.def("summary_from_sequences", &summary_from_sequences, py::arg("degree"), py::arg("strength"));

    py::class_<TradeDataset>(m, "TradeDataset")
        .def_property_readonly("node_ids", [](const TradeDataset& d) { return d.countries.ids(); })
        .def_property_readonly("gdp", [](const TradeDataset& d) { return d.countries.gdp(); })
        .def_property_readonly("dropped_ids", [](const TradeDataset& d) { return d.countries.dropped_ids; })
        .def_readonly("fitness", &TradeDataset::fitness)
        .def_readonly("network", &TradeDataset::network)
        .def_readonly("warnings", &TradeDataset::warnings);

    m.def(
        "load_dataset",
        [](const std::string& flows, const std::string& gdp, std::optional<int> year, double unit) {
            auto gin = open_in(gdp);
            const auto table = load_country_table(gin, year, gdp);
            auto fin = open_in(flows);
            const auto named = load_flows(fin, flows);
            return join_flows(table, named, unit);
        },
        py::arg("flows"), py::arg("gdp"), py::arg("year") = py::none(), py::arg("unit") = 1.0,
        "Read a flow list and a country table and join them into a weighted network.");

    // ---------------------------------------------------------- models

    py::class_<GdpModelParams>(m, "GdpModelParams")
        .def(py::init([](double a, double b, double c) { return GdpModelParams{a, b, c}; }), py::arg("a"),
             py::arg("b"), py::arg("c"))
        .def_readwrite("a", &GdpModelParams::a)
        .def_readwrite("b", &GdpModelParams::b)
        .def_readwrite("c", &GdpModelParams::c);

    py::class_<BcmSolution>(m, "BcmSolution").def_readonly("z", &BcmSolution::z);
    py::class_<WcmSolution>(m, "WcmSolution").def_readonly("y", &WcmSolution::y);
    py::class_<EcmSolution>(m, "EcmSolution").def_readonly("x", &EcmSolution::x).def_readonly("y", &EcmSolution::y);
    py::class_<TsSolution>(m, "TsSolution")
        .def(py::init([](Vector z, Vector y) {
                 TsSolution s{std::move(z), std::move(y)};
                 validate(s);
                 return s;
             }),
             py::arg("z"), py::arg("y"))
        .def_readonly("z", &TsSolution::z)
        .def_readonly("y", &TsSolution::y);

    m.def("ts_weight_pmf", &ts_weight_pmf, py::arg("z_i"), py::arg("z_j"), py::arg("y_i"), py::arg("y_j"),
          py::arg("w"));
    m.def("ts_expected_weight", &ts_expected_weight, py::arg("z_i"), py::arg("z_j"), py::arg("y_i"), py::arg("y_j"));
    m.def("ts_from_gdp", &ts_from_gdp, py::arg("fitness"), py::arg("params"));
    m.def("ts_probability_matrix", &ts_probability_matrix, py::arg("solution"));
    m.def("ts_weight_matrix", &ts_weight_matrix, py::arg("solution"));

    // --------------------------------------------------------- solvers

    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("iterations_used", &SolveReport::iterations_used)
        .def_readonly("final_residual", &SolveReport::final_residual)
        .def_property_readonly("degenerate_nodes",
                               [](const SolveReport& r) {
                                   std::vector<std::pair<std::size_t, std::string>> out;
                                   for (const auto& d : r.degenerate_nodes) out.emplace_back(d.node, d.reason);
                                   return out;
                               })
        .def_readonly("residual_trace", &SolveReport::residual_trace);

    const auto solver_args = [](auto&& f) {
        return [f](const NetworkSummary& s, double tolerance, std::size_t max_iterations, double damping,
                   const std::string& init) { return f(s, make_config(tolerance, max_iterations, damping, init)); };
    };
#define ITN_SOLVER(name)                                                                                          \
    m.def(#name, solver_args([](const NetworkSummary& s, const SolverConfig& c) { return name(s, c); }),          \
          py::arg("summary"), py::arg("tolerance") = 1e-8, py::arg("max_iterations") = 100000,                   \
          py::arg("damping") = 0.5, py::arg("init") = "degree_seeded")
    ITN_SOLVER(solve_bcm);
    ITN_SOLVER(solve_wcm);
    ITN_SOLVER(solve_ecm);
    ITN_SOLVER(solve_ts);
#undef ITN_SOLVER

    // ----------------------------------------------------- calibration

    py::class_<DensityFit>(m, "DensityFit")
        .def_readonly("a", &DensityFit::a)
        .def_readonly("achieved_L", &DensityFit::achieved_L)
        .def_readonly("target_L", &DensityFit::target_L)
        .def_readonly("boundary", &DensityFit::boundary);
    m.def(
        "fit_density_a",
        [](const FitnessVector& g, double L, const std::string& convention) {
            return fit_density_a(g, L, pair_convention_from_string(convention));
        },
        py::arg("fitness"), py::arg("L"), py::arg("pair_convention") = "unordered");

    m.def("fit_fitness", [](const Vector& x, const Vector& y, const FitnessVector& g) {
        return to_dict(to_json(fit_fitness(x, y, g)));
    }, py::arg("x"), py::arg("y"), py::arg("fitness"));

    m.def("fit_lognormal", [](const std::vector<double>& g_tilde) {
        return to_dict(to_json(fit_lognormal(g_tilde), true));
    }, py::arg("g_tilde"));

    m.def("predict_expectations", [](const FitnessVector& g, const GdpModelParams& p) {
        const auto e = predict_expectations(g, p);
        return py::make_tuple(e.degree, e.strength);
    }, py::arg("fitness"), py::arg("params"), "Expected (degree, strength) per node.");

    // ------------------------------------------------------ properties

    py::class_<PropertyVector>(m, "PropertyVector")
        .def_readonly("k", &PropertyVector::k)
        .def_readonly("s", &PropertyVector::s)
        .def_readonly("knn", &PropertyVector::knn)
        .def_readonly("snn", &PropertyVector::snn)
        .def_readonly("clustering", &PropertyVector::clustering)
        .def_readonly("L", &PropertyVector::L)
        .def_readonly("W", &PropertyVector::W);

    m.def("empirical_properties", &empirical_properties, py::arg("network"));
    m.def("expected_properties_ts", &expected_properties_ts, py::arg("solution"));
    m.def("expected_properties_ecm", &expected_properties_ecm, py::arg("solution"), py::arg("observed"));
    m.def("expected_properties_gdp", &expected_properties_gdp, py::arg("fitness"), py::arg("params"));
    m.def("spearman", &spearman, py::arg("a"), py::arg("b"));
    m.def("compare_reports", [](const PropertyVector& obs, const PropertyVector& exp) {
        py::dict out;
        for (const auto& s : compare_reports(obs, exp).summary)
            out[py::str(s.name)] = py::dict(py::arg("relative_rmse") = s.relative_rmse, py::arg("rmse") = s.rmse,
                                            py::arg("spearman") = s.spearman, py::arg("used") = s.used);
        return out;
    }, py::arg("observed"), py::arg("expected"));

    // --------------------------------------------------------- sampling

    py::class_<EnsembleStats>(m, "EnsembleStats")
        .def_readonly("n_samples", &EnsembleStats::n_samples)
        .def_readonly("mean_adjacency", &EnsembleStats::mean_adjacency)
        .def_readonly("se_adjacency", &EnsembleStats::se_adjacency)
        .def_readonly("mean_weight", &EnsembleStats::mean_weight)
        .def_readonly("se_weight", &EnsembleStats::se_weight)
        .def_readonly("mean_k", &EnsembleStats::mean_k)
        .def_readonly("mean_s", &EnsembleStats::mean_s)
        .def_readonly("mean_L", &EnsembleStats::mean_L)
        .def_readonly("se_L", &EnsembleStats::se_L)
        .def_readonly("mean_W", &EnsembleStats::mean_W)
        .def_readonly("se_W", &EnsembleStats::se_W);

    m.def("sample_network", py::overload_cast<const TsSolution&, std::uint64_t, std::uint64_t>(&sample_network),
          py::arg("solution"), py::arg("seed"), py::arg("sample_index") = 0);
    m.def(
        "sample_ensemble",
        [](const TsSolution& ts, std::uint64_t n_samples, std::uint64_t seed) {
            return sample_ensemble(ts, {n_samples, seed, SampledModel::TS});
        },
        py::arg("solution"), py::arg("n_samples"), py::arg("seed") = 0);
    m.def(
        "sample_ensemble_gdp",
        [](const FitnessVector& f, const GdpModelParams& p, std::uint64_t n_samples, std::uint64_t seed) {
            return sample_ensemble(GdpDriven{f, p}, {n_samples, seed, SampledModel::GdpDriven});
        },
        py::arg("fitness"), py::arg("params"), py::arg("n_samples"), py::arg("seed") = 0);
}
