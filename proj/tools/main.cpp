#include <CLI11.hpp>

#include <iostream>

#include "itn/serialization.hpp"

#include "commands.hpp"
#include "itn/errors.hpp"

namespace {

using namespace itn;
using namespace itn::cli;

void add_out(CLI::App* sub, std::optional<std::string>& out) {
    sub->add_option("--out", out, std::string("Output directory (default: $") + kOutputDirEnv + " or the working directory)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximum-entropy reconstruction of trade networks"};
    app.require_subcommand(1);

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Join flows with a GDP table and write a network bundle");
    c_ingest->add_option("--flows", ingest.flows, "src_id,dst_id,flow file")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--gdp", ingest.gdp, "country_id,year,gdp file")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--year", ingest.year, "Year to select when the GDP file holds several");
    c_ingest->add_option("--unit", ingest.unit, "Currency unit that one weight step represents")
        ->check(CLI::PositiveNumber);
    c_ingest->add_flag("--pooled-lognormal", ingest.pooled_lognormal,
                       "Fit the GDP log-normal on all years of the file instead of the selected one");
    add_out(c_ingest, ingest.out);

    FitOptions fit;
    std::string init = "degree_seeded";
    std::string convention = "unordered";
    auto* c_fit = app.add_subcommand("fit", "Solve a model on a bundle");
    c_fit->add_option("--bundle", fit.bundle, "Bundle directory written by ingest")
        ->required()
        ->check(CLI::ExistingDirectory);
    c_fit->add_option("--model", fit.model, "Model to fit")
        ->required()
        ->check(CLI::IsMember({"bcm", "wcm", "ecm", "ts", "gdp"}));
    c_fit->add_option("--tolerance", fit.solver.tolerance, "Relative residual tolerance")
        ->capture_default_str();
    c_fit->add_option("--max-iters", fit.solver.max_iterations, "Iteration budget")->capture_default_str();
    c_fit->add_option("--damping", fit.solver.damping, "Fixed-point damping in (0, 1]")->capture_default_str();
    c_fit->add_option("--init", init, "Initial multipliers")
        ->check(CLI::IsMember({"uniform", "degree_seeded"}))
        ->capture_default_str();
    c_fit->add_option("--pair-convention", convention, "Pair counting used by the density fit")
        ->check(CLI::IsMember({"ordered", "unordered"}))
        ->capture_default_str();
    c_fit->add_flag("--trace", fit.trace, "Store the residual trace in the report");
    add_out(c_fit, fit.out);

    PropertiesOptions props;
    auto* c_props = app.add_subcommand("properties", "Observed against expected node statistics");
    c_props->add_option("--bundle", props.bundle)->required()->check(CLI::ExistingDirectory);
    c_props->add_option("--solution", props.solution, "solution_<model>.json")->required()->check(CLI::ExistingFile);
    add_out(c_props, props.out);

    SampleOptions sample;
    auto* c_sample = app.add_subcommand("sample", "Draw networks from a fitted ensemble");
    c_sample->add_option("--bundle", sample.bundle)->required()->check(CLI::ExistingDirectory);
    c_sample->add_option("--solution", sample.solution)->required()->check(CLI::ExistingFile);
    c_sample->add_option("--samples", sample.samples, "Number of realizations")->capture_default_str();
    c_sample->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
    c_sample->add_flag("--dump", sample.dump, "Write every realization as i,j,w triples");
    add_out(c_sample, sample.out);

    CompareOptions compare;
    auto* c_compare = app.add_subcommand("compare", "Compare several fitted models on one bundle");
    c_compare->add_option("--bundle", compare.bundle)->required()->check(CLI::ExistingDirectory);
    c_compare->add_option("--solution", compare.solutions, "Repeat for each model")
        ->required()
        ->check(CLI::ExistingFile);
    add_out(c_compare, compare.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*c_ingest) return cmd_ingest(ingest);
        if (*c_fit) {
            fit.solver.initialization = initialization_from_string(init);
            fit.convention = pair_convention_from_string(convention);
            try {
                fit.solver.validate();
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
            return cmd_fit(fit);
        }
        if (*c_props) return cmd_properties(props);
        if (*c_sample) return cmd_sample(sample);
        if (*c_compare) return cmd_compare(compare);
    } catch (const UsageError& e) {
        std::cerr << "itn: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "itn: parse error: " << e.what() << '\n';
        return kParse;
    } catch (const InfeasibleError& e) {
        std::cerr << "itn: infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ValidationError& e) {
        std::cerr << "itn: invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const DomainError& e) {
        std::cerr << "itn: invalid input: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "itn: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
