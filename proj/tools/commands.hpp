#pragma once

// Subcommands of the itn tool. Each returns a process exit code; library
// errors propagate as exceptions and are mapped in main().

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "itn/gdp_calibration.hpp"
#include "itn/likelihood_solvers.hpp"

namespace itn::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kParse = 3,
    kValidation = 4,
    kInfeasible = 5,
    kNotConverged = 6,
};

/// Bad flag combination detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kOutputDirEnv = "ITN_OUTPUT_DIR";

/// --out if given, else $ITN_OUTPUT_DIR, else the working directory.
fs::path resolve_output_dir(const std::optional<std::string>& flag);

struct IngestOptions {
    std::string flows;
    std::string gdp;
    std::optional<int> year;
    double unit = 1.0;
    bool pooled_lognormal = false;
    std::optional<std::string> out;
};

struct FitOptions {
    std::string bundle;
    std::string model;
    SolverConfig solver;
    PairConvention convention = PairConvention::Unordered;
    bool trace = false;
    std::optional<std::string> out;
};

struct PropertiesOptions {
    std::string bundle;
    std::string solution;
    std::optional<std::string> out;
};

struct SampleOptions {
    std::string bundle;
    std::string solution;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    bool dump = false;
    std::optional<std::string> out;
};

struct CompareOptions {
    std::string bundle;
    std::vector<std::string> solutions;
    std::optional<std::string> out;
};

int cmd_ingest(const IngestOptions& opt);
int cmd_fit(const FitOptions& opt);
int cmd_properties(const PropertiesOptions& opt);
int cmd_sample(const SampleOptions& opt);
int cmd_compare(const CompareOptions& opt);

}  // namespace itn::cli
