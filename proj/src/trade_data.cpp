#include "itn/trade_data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "itn/errors.hpp"
#include "text_table.hpp"

namespace itn {

namespace {

std::string str(std::string_view s) { return std::string(s); }

}  // namespace

std::optional<std::size_t> CountryTable::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].id == id) return i;
    return std::nullopt;
}

std::vector<std::string> CountryTable::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.id);
    return out;
}

std::vector<double> CountryTable::gdp() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.gdp);
    return out;
}

CountryPanel load_country_panel(std::istream& in, std::string_view source) {
    const auto rows = detail::read_rows(in);
    CountryPanel panel;
    std::set<std::pair<int, std::string>> seen;
    bool first = true;
    for (const auto& row : rows) {
        const bool header_candidate = first;
        first = false;
        if (row.fields.size() != 3)
            throw ParseError(str(source), row.line,
                             "expected 3 fields (country_id,year,gdp), got " +
                                 std::to_string(row.fields.size()));
        const auto year = detail::parse_integer(row.fields[1]);
        const auto gdp = detail::parse_double(row.fields[2]);
        if (header_candidate && !year && !gdp) continue;
        if (row.fields[0].empty()) throw ParseError(str(source), row.line, "empty country_id");
        if (!year) throw ParseError(str(source), row.line, "year is not an integer: '" + row.fields[1] + "'");
        const auto gdp_text = detail::trim(row.fields[2]);
        const bool missing = gdp_text.empty() || gdp_text == "NA" || gdp_text == "." || gdp_text == "nan";
        if (!missing && (!gdp || !std::isfinite(*gdp)))
            throw ParseError(str(source), row.line, "gdp is not a finite number: '" + row.fields[2] + "'");

        const int y = static_cast<int>(*year);
        if (!seen.emplace(y, row.fields[0]).second)
            throw ValidationError(str(source) + ":" + std::to_string(row.line) + ": duplicate country_id '" +
                                  row.fields[0] + "' for year " + std::to_string(y));

        auto& table = panel.years[y];
        table.year = y;
        if (missing || *gdp <= 0.0) {
            table.dropped_ids.push_back(row.fields[0]);
            table.warnings.push_back("line " + std::to_string(row.line) + ": country '" + row.fields[0] +
                                     (missing ? "' has no gdp" : "' has nonpositive gdp") + " and was dropped");
            continue;
        }
        table.entries.push_back({row.fields[0], *gdp});
    }
    return panel;
}

CountryTable load_country_table(std::istream& in, std::optional<int> year, std::string_view source) {
    auto panel = load_country_panel(in, source);
    if (year) {
        auto it = panel.years.find(*year);
        if (it == panel.years.end())
            throw ValidationError(str(source) + ": no rows for year " + std::to_string(*year));
        return std::move(it->second);
    }
    if (panel.years.empty()) return CountryTable{};
    if (panel.years.size() > 1)
        throw ValidationError(str(source) + ": file holds " + std::to_string(panel.years.size()) +
                              " years; select one");
    return std::move(panel.years.begin()->second);
}

FitnessVector rescale_gdp(std::span<const double> gdp) {
    if (gdp.empty()) throw DomainError("rescale_gdp: empty GDP vector");
    for (double v : gdp)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("rescale_gdp: GDP values must be positive and finite");
    const auto n = static_cast<Eigen::Index>(gdp.size());
    const Eigen::Map<const Vector> raw(gdp.data(), n);
    // Scale by the maximum first so huge USD totals cannot overflow.
    const double peak = raw.maxCoeff();
    const Vector scaled = raw / peak;
    const double total = scaled.sum();
    FitnessVector f;
    f.g = scaled / total;
    f.g_tilde = static_cast<double>(n) * f.g;
    return f;
}

FitnessVector rescale_gdp(const CountryTable& table) {
    const auto gdp = table.gdp();
    return rescale_gdp(std::span<const double>(gdp));
}

WeightedNetwork::WeightedNetwork(WeightMatrix w, std::vector<std::string> node_ids)
    : w_(std::move(w)), ids_(std::move(node_ids)) {
    if (w_.rows() != w_.cols()) throw ValidationError("weight matrix must be square");
    if (!ids_.empty() && ids_.size() != static_cast<std::size_t>(w_.rows()))
        throw ValidationError("node_ids length does not match the matrix size");
    for (Eigen::Index i = 0; i < w_.rows(); ++i) {
        if (w_(i, i) != 0) throw ValidationError("weight matrix diagonal must be zero");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (w_(i, j) < 0) throw ValidationError("weights must be nonnegative");
            if (w_(i, j) != w_(j, i)) throw ValidationError("weight matrix must be symmetric");
        }
    }
}

Matrix WeightedNetwork::adjacency() const {
    return (w_.array() > 0).cast<double>().matrix();
}

WeightedNetwork build_network(std::span<const Flow> flows, std::size_t n, double unit,
                              std::vector<std::string> node_ids) {
    if (!(unit > 0.0) || !std::isfinite(unit)) throw ValidationError("unit must be positive");
    Matrix raw = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& f : flows) {
        if (f.src >= n || f.dst >= n)
            throw ValidationError("flow index out of range: (" + std::to_string(f.src) + "," +
                                  std::to_string(f.dst) + ") with n=" + std::to_string(n));
        if (!(f.raw >= 0.0) || !std::isfinite(f.raw))
            throw ValidationError("negative or non-finite flow between " + std::to_string(f.src) + " and " +
                                  std::to_string(f.dst));
        raw(static_cast<Eigen::Index>(f.src), static_cast<Eigen::Index>(f.dst)) += f.raw;
    }
    WeightMatrix w = WeightMatrix::Zero(raw.rows(), raw.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) {
            const double units = (raw(i, j) + raw(j, i)) / (2.0 * unit);
            const auto rounded = static_cast<std::int64_t>(std::floor(units + 0.5));
            w(i, j) = w(j, i) = rounded;
        }
    return WeightedNetwork(std::move(w), std::move(node_ids));
}

Vector NetworkSummary::degree_vector() const {
    Vector v(static_cast<Eigen::Index>(degree.size()));
    for (std::size_t i = 0; i < degree.size(); ++i) v[static_cast<Eigen::Index>(i)] = static_cast<double>(degree[i]);
    return v;
}

Vector NetworkSummary::strength_vector() const {
    Vector v(static_cast<Eigen::Index>(strength.size()));
    for (std::size_t i = 0; i < strength.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = static_cast<double>(strength[i]);
    return v;
}

NetworkSummary summarize(const WeightedNetwork& net) {
    NetworkSummary s;
    s.n = net.size();
    s.degree.assign(s.n, 0);
    s.strength.assign(s.n, 0);
    const auto& w = net.weights();
    for (std::size_t i = 0; i < s.n; ++i)
        for (std::size_t j = 0; j < s.n; ++j) {
            if (i == j) continue;
            const auto wij = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (wij > 0) ++s.degree[i];
            s.strength[i] += wij;
        }
    s.link_count = std::accumulate(s.degree.begin(), s.degree.end(), std::int64_t{0}) / 2;
    s.total_weight = std::accumulate(s.strength.begin(), s.strength.end(), std::int64_t{0}) / 2;
    return s;
}

NetworkSummary summary_from_sequences(std::vector<std::int64_t> degree, std::vector<std::int64_t> strength) {
    if (degree.size() != strength.size())
        throw ValidationError("degree and strength sequences differ in length");
    const auto n = degree.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] < 0 || strength[i] < 0) throw ValidationError("negative degree or strength");
        if (n > 0 && degree[i] > static_cast<std::int64_t>(n - 1))
            throw ValidationError("degree exceeds n-1 at node " + std::to_string(i));
    }
    const auto ksum = std::accumulate(degree.begin(), degree.end(), std::int64_t{0});
    const auto ssum = std::accumulate(strength.begin(), strength.end(), std::int64_t{0});
    if (ksum % 2 != 0 || ssum % 2 != 0) throw ValidationError("degree and strength sums must be even");
    NetworkSummary s;
    s.n = n;
    s.degree = std::move(degree);
    s.strength = std::move(strength);
    s.link_count = ksum / 2;
    s.total_weight = ssum / 2;
    return s;
}

std::vector<NamedFlow> load_flows(std::istream& in, std::string_view source) {
    const auto rows = detail::read_rows(in);
    std::vector<NamedFlow> flows;
    bool first = true;
    for (const auto& row : rows) {
        const bool header_candidate = first;
        first = false;
        if (row.fields.size() != 3)
            throw ParseError(str(source), row.line,
                             "expected 3 fields (src_id,dst_id,flow), got " + std::to_string(row.fields.size()));
        const auto value = detail::parse_double(row.fields[2]);
        if (header_candidate && !value) continue;
        if (!value || !std::isfinite(*value))
            throw ParseError(str(source), row.line, "flow is not a finite number: '" + row.fields[2] + "'");
        if (row.fields[0].empty() || row.fields[1].empty())
            throw ParseError(str(source), row.line, "empty country id");
        if (*value < 0.0) throw ParseError(str(source), row.line, "negative flow");
        flows.push_back({row.fields[0], row.fields[1], *value});
    }
    return flows;
}

TradeDataset join_flows(const CountryTable& countries, std::span<const NamedFlow> flows, double unit) {
    TradeDataset data;
    data.countries = countries;
    data.warnings = countries.warnings;

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < countries.entries.size(); ++i) index.emplace(countries.entries[i].id, i);
    const std::set<std::string> dropped(countries.dropped_ids.begin(), countries.dropped_ids.end());

    std::vector<Flow> resolved;
    resolved.reserve(flows.size());
    std::set<std::string> warned;
    for (const auto& f : flows) {
        const auto si = index.find(f.src);
        const auto di = index.find(f.dst);
        bool skip = false;
        for (const auto* id : {&f.src, &f.dst}) {
            if (index.count(*id)) continue;
            if (dropped.count(*id)) {
                skip = true;
                if (warned.insert(*id).second)
                    data.warnings.push_back("flows of '" + *id + "' dropped: no positive GDP");
                continue;
            }
            throw ValidationError("flow references unknown country id '" + *id + "'");
        }
        if (skip) continue;
        resolved.push_back({si->second, di->second, f.flow});
    }
    data.network = build_network(resolved, countries.size(), unit, countries.ids());
    if (countries.size() > 0) data.fitness = rescale_gdp(countries);
    return data;
}

void write_dense(std::ostream& out, const WeightedNetwork& net, char delimiter) {
    const auto& w = net.weights();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (j) out << delimiter;
            out << w(i, j);
        }
        out << '\n';
    }
}

void write_triples(std::ostream& out, const WeightedNetwork& net, char delimiter) {
    const auto& w = net.weights();
    out << "i" << delimiter << "j" << delimiter << "w\n";
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = i + 1; j < w.cols(); ++j)
            if (w(i, j) > 0) out << i << delimiter << j << delimiter << w(i, j) << '\n';
}

WeightedNetwork read_triples(std::istream& in, std::size_t n, std::vector<std::string> node_ids,
                             std::string_view source) {
    const auto rows = detail::read_rows(in);
    WeightMatrix w = WeightMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    bool first = true;
    for (const auto& row : rows) {
        const bool header_candidate = first;
        first = false;
        if (row.fields.size() != 3)
            throw ParseError(str(source), row.line, "expected 3 fields (i,j,w)");
        const auto i = detail::parse_integer(row.fields[0]);
        const auto j = detail::parse_integer(row.fields[1]);
        const auto v = detail::parse_integer(row.fields[2]);
        if (header_candidate && !i && !j && !v) continue;
        if (!i || !j || !v) throw ParseError(str(source), row.line, "non-integer field");
        if (*i < 0 || *j < 0 || static_cast<std::size_t>(*i) >= n || static_cast<std::size_t>(*j) >= n)
            throw ValidationError(str(source) + ":" + std::to_string(row.line) + ": node index out of range");
        if (*v < 0) throw ValidationError(str(source) + ":" + std::to_string(row.line) + ": negative weight");
        if (*i == *j) {
            if (*v != 0) throw ValidationError(str(source) + ":" + std::to_string(row.line) + ": self-loop");
            continue;
        }
        w(*i, *j) = w(*j, *i) = *v;
    }
    return WeightedNetwork(std::move(w), std::move(node_ids));
}

}  // namespace itn
