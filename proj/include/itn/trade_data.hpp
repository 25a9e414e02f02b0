#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace itn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using WeightMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct CountryEntry {
    std::string id;
    double gdp = 0.0;  // USD
};

/// GDP snapshot for one year. Entries keep file order; ids are unique.
struct CountryTable {
    std::vector<CountryEntry> entries;
    std::optional<int> year;
    /// Ids whose rows carried a nonpositive GDP and were dropped.
    std::vector<std::string> dropped_ids;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return entries.size(); }
    std::size_t warning_count() const noexcept { return warnings.size(); }
    std::optional<std::size_t> index_of(std::string_view id) const;
    std::vector<std::string> ids() const;
    std::vector<double> gdp() const;
};

/// All years present in a country file.
struct CountryPanel {
    std::map<int, CountryTable> years;
};

/// Reads `country_id,year,gdp` rows (comma or tab separated, `#` comments,
/// optional header). Throws ParseError on malformed rows and ValidationError on
/// a duplicated (country_id, year).
CountryPanel load_country_panel(std::istream& in, std::string_view source = "<country-table>");

/// Same format, restricted to one year. With no year given the file must hold
/// a single year.
CountryTable load_country_table(std::istream& in, std::optional<int> year = std::nullopt,
                                std::string_view source = "<country-table>");

/// Rescaled GDP: g sums to one, g_tilde = n * g.
struct FitnessVector {
    Vector g;
    Vector g_tilde;

    std::size_t size() const noexcept { return static_cast<std::size_t>(g.size()); }
};

FitnessVector rescale_gdp(std::span<const double> gdp);
FitnessVector rescale_gdp(const CountryTable& table);

/// Directed flow between node indices, in raw currency units.
struct Flow {
    std::size_t src = 0;
    std::size_t dst = 0;
    double raw = 0.0;
};

/// Symmetric nonnegative integer weights with zero diagonal.
class WeightedNetwork {
public:
    WeightedNetwork() = default;
    /// Validates symmetry, nonnegativity and the zero diagonal.
    explicit WeightedNetwork(WeightMatrix w, std::vector<std::string> node_ids = {});

    std::size_t size() const noexcept { return static_cast<std::size_t>(w_.rows()); }
    std::int64_t weight(std::size_t i, std::size_t j) const { return w_(i, j); }
    bool linked(std::size_t i, std::size_t j) const { return w_(i, j) > 0; }
    const WeightMatrix& weights() const noexcept { return w_; }
    const std::vector<std::string>& node_ids() const noexcept { return ids_; }

    /// a_ij = Theta[w_ij] as a dense 0/1 matrix.
    Matrix adjacency() const;
    Matrix weights_real() const { return w_.cast<double>(); }

private:
    WeightMatrix w_;
    std::vector<std::string> ids_;
};

/// Averages both directions, divides by `unit` and rounds half-up.
WeightedNetwork build_network(std::span<const Flow> flows, std::size_t n, double unit,
                              std::vector<std::string> node_ids = {});

struct NetworkSummary {
    std::size_t n = 0;
    std::int64_t link_count = 0;    // L, unordered pairs
    std::int64_t total_weight = 0;  // W, unordered pairs
    std::vector<std::int64_t> degree;
    std::vector<std::int64_t> strength;

    Vector degree_vector() const;
    Vector strength_vector() const;
};

NetworkSummary summarize(const WeightedNetwork& net);

/// Builds a summary straight from degree and strength sequences (solver input
/// without a network). Checks lengths, signs and the L/W parity.
NetworkSummary summary_from_sequences(std::vector<std::int64_t> degree,
                                      std::vector<std::int64_t> strength);

struct NamedFlow {
    std::string src;
    std::string dst;
    double flow = 0.0;
};

/// Reads `src_id,dst_id,flow` rows.
std::vector<NamedFlow> load_flows(std::istream& in, std::string_view source = "<flows>");

/// Result of joining a flow list with a country table.
struct TradeDataset {
    CountryTable countries;
    FitnessVector fitness;
    WeightedNetwork network;
    std::vector<std::string> warnings;
};

/// Ids absent from the table are a ValidationError. Ids that were dropped
/// for nonpositive GDP lose their flows with a warning.
TradeDataset join_flows(const CountryTable& countries, std::span<const NamedFlow> flows,
                        double unit);

void write_dense(std::ostream& out, const WeightedNetwork& net, char delimiter = ',');
void write_triples(std::ostream& out, const WeightedNetwork& net, char delimiter = ',');
/// Reads an `i,j,w` list (header optional) into an n-node network.
WeightedNetwork read_triples(std::istream& in, std::size_t n, std::vector<std::string> node_ids = {},
                             std::string_view source = "<triples>");

}  // namespace itn
