#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "itn/ensemble_sampler.hpp"
#include "itn/errors.hpp"
#include "itn/net_properties.hpp"
#include "itn/serialization.hpp"
#include "itn/trade_data.hpp"
#include "text_table.hpp"

namespace itn::cli {

namespace {

// ------------------------------------------------------------------ files

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot open '" + p.string() + "' for reading");
    return in;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot open '" + p.string() + "' for writing");
    out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

json read_json(const fs::path& p) {
    auto in = open_in(p);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(p.string(), 0, e.what());
    }
}

fs::path prepare_output_dir(const std::optional<std::string>& flag) {
    const auto dir = resolve_output_dir(flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

// ----------------------------------------------------------------- bundle

struct Bundle {
    std::vector<std::string> ids;
    std::vector<double> gdp;
    FitnessVector fitness;
    WeightedNetwork network;
    NetworkSummary summary;
};

void write_nodes(const fs::path& p, const CountryTable& table, const FitnessVector& f) {
    std::ostringstream out;
    out << std::setprecision(17) << "node_id,gdp,g,g_tilde\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out << table.entries[i].id << ',' << table.entries[i].gdp << ',' << f.g[ii] << ',' << f.g_tilde[ii] << '\n';
    }
    write_text(p, out.str());
}

Bundle load_bundle(const fs::path& dir) {
    Bundle b;
    const auto nodes_path = dir / "nodes.csv";
    auto nodes_in = open_in(nodes_path);
    bool first = true;
    for (const auto& row : detail::read_rows(nodes_in)) {
        const bool header = first;
        first = false;
        if (row.fields.size() != 4)
            throw ParseError(nodes_path.string(), row.line, "expected node_id,gdp,g,g_tilde");
        const auto gdp = detail::parse_double(row.fields[1]);
        if (!gdp) {
            if (header) continue;
            throw ParseError(nodes_path.string(), row.line, "gdp is not a number: '" + row.fields[1] + "'");
        }
        b.ids.push_back(row.fields[0]);
        b.gdp.push_back(*gdp);
    }
    if (!b.gdp.empty()) b.fitness = rescale_gdp(std::span<const double>(b.gdp));
    const auto net_path = dir / "network.csv";
    auto net_in = open_in(net_path);
    b.network = read_triples(net_in, b.ids.size(), b.ids, net_path.string());
    b.summary = summarize(b.network);
    return b;
}

// --------------------------------------------------------------- solution

ModelSolution load_solution(const fs::path& p, const Bundle& bundle) {
    auto sol = solution_from_json(read_json(p));
    if (!sol.node_ids.empty() && sol.node_ids != bundle.ids)
        throw ValidationError("solution '" + p.string() + "' was fitted on a different node set than the bundle");
    std::size_t n = bundle.ids.size();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (!std::is_same_v<T, GdpModelParams>)
                if (s.size() != n)
                    throw ValidationError("solution '" + p.string() + "' has " + std::to_string(s.size()) +
                                          " nodes, bundle has " + std::to_string(n));
        },
        sol.params);
    return sol;
}

ExpectedPropertyVector expected_for(const ModelSolution& sol, const Bundle& b) {
    return std::visit(
        [&](const auto& s) -> ExpectedPropertyVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EcmSolution>) {
                return expected_properties_ecm(s, b.summary);
            } else if constexpr (std::is_same_v<T, TsSolution>) {
                return expected_properties_ts(s);
            } else if constexpr (std::is_same_v<T, GdpModelParams>) {
                return expected_properties_gdp(b.fitness, s);
            } else if constexpr (std::is_same_v<T, BcmSolution>) {
                const Matrix p = bcm_probability_matrix(s);
                const Vector k = p.rowwise().sum();
                return expected_properties(p, p, k, k, k);
            } else {
                // WCM: P(w >= 1) = y_i y_j.
                const Matrix p = wcm_probability_matrix(s);
                const Matrix w = wcm_weight_matrix(s);
                const Vector k = p.rowwise().sum();
                const Vector st = w.rowwise().sum();
                return expected_properties(p, w, k, st, k);
            }
        },
        sol.params);
}

SamplerParams sampler_params(const ModelSolution& sol, const Bundle& b) {
    return std::visit(
        [&](const auto& s) -> SamplerParams {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GdpModelParams>) {
                return GdpDriven{b.fitness, s};
            } else if constexpr (std::is_same_v<T, EcmSolution>) {
                throw ValidationError("the ecm ensemble is not sampled directly; fit the ts model instead");
            } else {
                return s;
            }
        },
        sol.params);
}

json manifest(const std::string& command, const fs::path& out_dir) {
    return json{{"command", command}, {"output_dir", out_dir.string()}};
}

std::vector<std::string> ids_of(const std::vector<std::size_t>& nodes, const std::vector<std::string>& ids) {
    std::vector<std::string> out;
    for (auto i : nodes) out.push_back(i < ids.size() ? ids[i] : std::to_string(i));
    return out;
}

[[noreturn]] void rethrow_with_ids(const InfeasibleError& e, const std::vector<std::string>& ids) {
    std::string names;
    for (const auto& s : ids_of(e.nodes(), ids)) names += (names.empty() ? "" : ", ") + s;
    throw InfeasibleError(std::string(e.what()) + (names.empty() ? "" : " [countries: " + names + "]"), e.nodes());
}

json degenerate_with_ids(const SolveReport& r, const std::vector<std::string>& ids) {
    json out = json::array();
    for (const auto& d : r.degenerate_nodes)
        out.push_back({{"node", d.node}, {"id", d.node < ids.size() ? ids[d.node] : ""}, {"reason", d.reason}});
    return out;
}

json report_json(const SolveReport& r, const std::vector<std::string>& ids, bool trace) {
    json j = to_json(r, trace);
    j["degenerate_nodes"] = degenerate_with_ids(r, ids);
    return j;
}

void warn_not_converged(const std::string& model, const SolveReport& r) {
    std::cerr << "itn: " << model << " solver did not converge (residual " << r.final_residual << " after "
              << r.iterations_used << " iterations";
    if (!r.degenerate_nodes.empty()) std::cerr << "; see degenerate_nodes in the report";
    std::cerr << ")\n";
}

}  // namespace

fs::path resolve_output_dir(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return fs::path(*flag);
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return fs::path(env);
    return fs::current_path();
}

// ------------------------------------------------------------------ ingest

int cmd_ingest(const IngestOptions& opt) {
    if (!(opt.unit > 0.0)) throw UsageError("--unit must be positive");
    const auto out_dir = prepare_output_dir(opt.out);

    auto gdp_in = open_in(opt.gdp);
    const auto panel = load_country_panel(gdp_in, opt.gdp);
    CountryTable table;
    if (opt.year) {
        const auto it = panel.years.find(*opt.year);
        if (it == panel.years.end()) throw ValidationError(opt.gdp + ": no rows for year " + std::to_string(*opt.year));
        table = it->second;
    } else if (panel.years.size() == 1) {
        table = panel.years.begin()->second;
    } else if (!panel.years.empty()) {
        throw UsageError(opt.gdp + " holds " + std::to_string(panel.years.size()) + " years; pick one with --year");
    }
    if (table.size() == 0) throw ValidationError(opt.gdp + ": no country with positive GDP");

    auto flows_in = open_in(opt.flows);
    const auto flows = load_flows(flows_in, opt.flows);
    const auto data = join_flows(table, flows, opt.unit);
    const auto summary = summarize(data.network);

    write_nodes(out_dir / "nodes.csv", data.countries, data.fitness);
    {
        std::ostringstream s;
        write_triples(s, data.network);
        write_text(out_dir / "network.csv", s.str());
    }
    {
        std::ostringstream s;
        write_dense(s, data.network);
        write_text(out_dir / "network_dense.csv", s.str());
    }

    json summary_doc = to_json(summary);
    summary_doc["year"] = table.year ? json(*table.year) : json(nullptr);
    summary_doc["unit"] = opt.unit;
    summary_doc["node_ids"] = data.countries.ids();
    summary_doc["dropped_ids"] = data.countries.dropped_ids;
    summary_doc["warnings"] = data.warnings;
    write_json(out_dir / "summary.json", summary_doc);

    // Log-normal description of g_tilde, for the selected year or pooled over
    // every year of the file (each year rescaled on its own).
    std::vector<double> pooled;
    std::vector<int> years;
    if (opt.pooled_lognormal) {
        for (const auto& [y, t] : panel.years) {
            if (t.size() == 0) continue;
            const auto f = rescale_gdp(t);
            pooled.insert(pooled.end(), f.g_tilde.data(), f.g_tilde.data() + f.g_tilde.size());
            years.push_back(y);
        }
    } else {
        pooled.assign(data.fitness.g_tilde.data(), data.fitness.g_tilde.data() + data.fitness.g_tilde.size());
        if (table.year) years.push_back(*table.year);
    }
    json ln{{"scope", opt.pooled_lognormal ? "pooled" : "year"}, {"years", years}};
    if (pooled.size() >= 2) {
        ln["fit"] = to_json(fit_lognormal(pooled), true);
    } else {
        ln["fit"] = nullptr;
        ln["note"] = "fewer than two GDP values; no fit";
    }
    write_json(out_dir / "lognormal.json", ln);

    json m = manifest("ingest", out_dir);
    m["inputs"] = {{"flows", opt.flows}, {"gdp", opt.gdp}};
    m["year"] = opt.year ? json(*opt.year) : json(nullptr);
    m["unit"] = opt.unit;
    m["pooled_lognormal"] = opt.pooled_lognormal;
    write_json(out_dir / "manifest_ingest.json", m);

    for (const auto& w : data.warnings) std::cerr << "itn: warning: " << w << '\n';
    std::cout << "n=" << summary.n << " L=" << summary.link_count << " W=" << summary.total_weight << '\n';
    return kOk;
}

// --------------------------------------------------------------------- fit

int cmd_fit(const FitOptions& opt) {
    opt.solver.validate();
    const auto out_dir = prepare_output_dir(opt.out);
    const auto b = load_bundle(opt.bundle);
    const auto& ids = b.ids;

    json doc;
    bool converged = true;
    int code = kOk;
    SolveReport main_report;
    try {
        if (opt.model == "bcm") {
            auto [s, r] = solve_bcm(b.summary, opt.solver);
            doc = solution_to_json({"bcm", ids, s});
            main_report = std::move(r);
        } else if (opt.model == "wcm") {
            auto [s, r] = solve_wcm(b.summary, opt.solver);
            doc = solution_to_json({"wcm", ids, s});
            main_report = std::move(r);
        } else if (opt.model == "ecm") {
            auto [s, r] = solve_ecm(b.summary, opt.solver);
            doc = solution_to_json({"ecm", ids, s});
            main_report = std::move(r);
        } else if (opt.model == "ts") {
            auto [s, r] = solve_ts(b.summary, opt.solver);
            doc = solution_to_json({"ts", ids, s});
            main_report = std::move(r);
        } else if (opt.model == "gdp") {
            if (b.ids.empty()) throw ValidationError("bundle has no nodes");
            // a from the density condition; sqrt(a), b, c from regressions on
            // the solved ECM multipliers.
            auto [ecm, r] = solve_ecm(b.summary, opt.solver);
            main_report = std::move(r);
            const auto density =
                fit_density_a(b.fitness, static_cast<double>(b.summary.link_count), opt.convention);
            doc = json{{"model", "gdp"}, {"node_ids", ids}};
            doc["density"] = to_json(density);
            doc["ecm"] = solution_to_json({"ecm", ids, ecm});
            try {
                const auto ff = fit_fitness(ecm.x, ecm.y, b.fitness);
                doc["fitness_fit"] = to_json(ff);
                const GdpModelParams params{density.a, ff.b, ff.c};
                validate(params);
                doc["params"] = to_json(params);
                doc["sqrt_a_from_density"] = std::sqrt(density.a);
                doc["induced_weight_ratio"] =
                    b.summary.total_weight > 0
                        ? json(induced_weight_ratio(b.fitness, params, static_cast<double>(b.summary.total_weight)))
                        : json(nullptr);
                const auto e = predict_expectations(b.fitness, params);
                doc["expected_degree"] = vector_to_json(e.degree);
                doc["expected_strength"] = vector_to_json(e.strength);
            } catch (const DomainError& e) {
                doc["params"] = nullptr;
                doc["calibration_error"] = e.what();
                std::cerr << "itn: gdp calibration incomplete: " << e.what() << '\n';
                code = kValidation;
            }
        } else {
            throw UsageError("unknown model '" + opt.model + "' (expected bcm, wcm, ecm, ts or gdp)");
        }
    } catch (const InfeasibleError& e) {
        rethrow_with_ids(e, ids);
    }

    converged = main_report.converged;
    doc["report"] = report_json(main_report, ids, opt.trace);
    doc["config"] = to_json(opt.solver);
    write_json(out_dir / ("solution_" + opt.model + ".json"), doc);

    json m = manifest("fit", out_dir);
    m["inputs"] = {{"bundle", opt.bundle}};
    m["model"] = opt.model;
    m["solver_config"] = to_json(opt.solver);
    m["pair_convention"] = to_string(opt.convention);
    write_json(out_dir / ("manifest_fit_" + opt.model + ".json"), m);

    if (!converged) {
        warn_not_converged(opt.model == "gdp" ? "ecm (gdp calibration)" : opt.model, main_report);
        return kNotConverged;
    }
    return code;
}

// -------------------------------------------------------------- properties

int cmd_properties(const PropertiesOptions& opt) {
    const auto out_dir = prepare_output_dir(opt.out);
    const auto b = load_bundle(opt.bundle);
    const auto sol = load_solution(opt.solution, b);
    const auto table = compare_reports(empirical_properties(b.network), expected_for(sol, b));

    {
        std::ostringstream s;
        write_comparison_csv(s, table, b.ids, b.fitness.g);
        write_text(out_dir / ("properties_" + sol.model + ".csv"), s.str());
    }
    json stats = json::array();
    for (const auto& st : table.summary)
        stats.push_back({{"statistic", st.name},
                         {"relative_rmse", st.relative_rmse},
                         {"rmse", st.rmse},
                         {"spearman", std::isnan(st.spearman) ? json(nullptr) : json(st.spearman)},
                         {"used", st.used}});
    write_json(out_dir / ("properties_" + sol.model + ".json"),
               json{{"model", sol.model},
                    {"n", b.ids.size()},
                    {"observed_L", table.observed.L},
                    {"expected_L", table.expected.L},
                    {"observed_W", table.observed.W},
                    {"expected_W", table.expected.W},
                    {"statistics", stats}});

    json m = manifest("properties", out_dir);
    m["inputs"] = {{"bundle", opt.bundle}, {"solution", opt.solution}};
    m["model"] = sol.model;
    write_json(out_dir / ("manifest_properties_" + sol.model + ".json"), m);
    return kOk;
}

// ------------------------------------------------------------------ sample

int cmd_sample(const SampleOptions& opt) {
    if (opt.samples == 0) throw UsageError("--samples must be at least 1");
    const auto out_dir = prepare_output_dir(opt.out);
    const auto b = load_bundle(opt.bundle);
    const auto sol = load_solution(opt.solution, b);
    const auto params = sampler_params(sol, b);

    RealizationSink sink;
    fs::path dump_dir = out_dir / ("realizations_" + sol.model);
    if (opt.dump) {
        fs::create_directories(dump_dir);
        sink = [&](std::uint64_t idx, const WeightedNetwork& net) {
            std::ostringstream name;
            name << "sample_" << std::setw(6) << std::setfill('0') << idx << ".csv";
            std::ostringstream s;
            write_triples(s, net);
            write_text(dump_dir / name.str(), s.str());
        };
    }
    const auto stats = sample_ensemble(params, {opt.samples, opt.seed, model_of(params)}, sink);

    json doc = to_json(stats);
    doc["seed"] = opt.seed;
    doc["node_ids"] = b.ids;
    write_json(out_dir / ("ensemble_" + sol.model + ".json"), doc);

    std::ostringstream pairs;
    pairs << std::setprecision(17) << "i,j,mean_a,se_a,mean_w,se_w\n";
    for (Eigen::Index i = 0; i < stats.mean_adjacency.rows(); ++i)
        for (Eigen::Index j = i + 1; j < stats.mean_adjacency.cols(); ++j)
            pairs << i << ',' << j << ',' << stats.mean_adjacency(i, j) << ',' << stats.se_adjacency(i, j) << ','
                  << stats.mean_weight(i, j) << ',' << stats.se_weight(i, j) << '\n';
    write_text(out_dir / ("ensemble_" + sol.model + "_pairs.csv"), pairs.str());

    json m = manifest("sample", out_dir);
    m["inputs"] = {{"bundle", opt.bundle}, {"solution", opt.solution}};
    m["model"] = sol.model;
    m["samples"] = opt.samples;
    m["seed"] = opt.seed;
    m["dump_realizations"] = opt.dump;
    write_json(out_dir / ("manifest_sample_" + sol.model + ".json"), m);
    return kOk;
}

// ----------------------------------------------------------------- compare

int cmd_compare(const CompareOptions& opt) {
    if (opt.solutions.empty()) throw UsageError("compare needs at least one --solution");
    const auto out_dir = prepare_output_dir(opt.out);
    const auto b = load_bundle(opt.bundle);
    const auto observed = empirical_properties(b.network);

    json models = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "model,statistic,relative_rmse,rmse,spearman,used\n";
    for (const auto& path : opt.solutions) {
        const auto sol = load_solution(path, b);
        const auto table = compare_reports(observed, expected_for(sol, b));
        json rows = json::array();
        for (const auto& st : table.summary) {
            rows.push_back({{"statistic", st.name},
                            {"relative_rmse", st.relative_rmse},
                            {"rmse", st.rmse},
                            {"spearman", std::isnan(st.spearman) ? json(nullptr) : json(st.spearman)},
                            {"used", st.used}});
            csv << sol.model << ',' << st.name << ',' << st.relative_rmse << ',' << st.rmse << ',';
            if (std::isnan(st.spearman)) csv << "nan";
            else csv << st.spearman;
            csv << ',' << st.used << '\n';
        }
        models.push_back({{"model", sol.model},
                          {"solution", path},
                          {"expected_L", table.expected.L},
                          {"expected_W", table.expected.W},
                          {"statistics", rows}});
    }
    write_json(out_dir / "compare.json",
               json{{"n", b.ids.size()}, {"observed_L", observed.L}, {"observed_W", observed.W}, {"models", models}});
    write_text(out_dir / "compare.csv", csv.str());

    json m = manifest("compare", out_dir);
    m["inputs"] = {{"bundle", opt.bundle}, {"solutions", opt.solutions}};
    write_json(out_dir / "manifest_compare.json", m);
    return kOk;
}

}  // namespace itn::cli
