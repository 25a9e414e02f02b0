#include "itn/net_properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "itn/errors.hpp"

namespace itn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vector neighbour_average(const Matrix& weights, const Vector& values, const Vector& norm) {
    Vector out = weights * values;
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = norm[i] > 0.0 ? out[i] / norm[i] : kNaN;
    return out;
}

void check_square(const Matrix& m, Eigen::Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) throw DomainError(std::string(what) + ": dimension mismatch");
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
        i = j + 1;
    }
    return r;
}

const Vector& column(const PropertyVector& p, std::size_t which) {
    switch (which) {
        case 0: return p.k;
        case 1: return p.s;
        case 2: return p.knn;
        case 3: return p.snn;
        default: return p.clustering;
    }
}

}  // namespace

PropertyVector empirical_properties(const WeightedNetwork& net) {
    const Matrix a = net.adjacency();
    const Matrix w = net.weights_real();
    PropertyVector p;
    p.k = a.rowwise().sum();
    p.s = w.rowwise().sum();
    p.knn = neighbour_average(a, p.k, p.k);
    p.snn = neighbour_average(a, p.s, p.k);
    const Matrix a2 = a * a;
    p.clustering.resize(p.k.size());
    for (Eigen::Index i = 0; i < p.k.size(); ++i) {
        const double k = p.k[i];
        p.clustering[i] = k >= 2.0 ? a2.row(i).dot(a.col(i)) / (k * (k - 1.0)) : kNaN;
    }
    p.L = 0.5 * p.k.sum();
    p.W = 0.5 * p.s.sum();
    return p;
}

Vector expected_clustering(const Matrix& p) {
    const Matrix p2 = p * p;
    Vector c(p.rows());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        const double num = p2.row(i).dot(p.col(i));
        const double row = p.row(i).sum();
        const double den = row * row - p.row(i).squaredNorm();
        c[i] = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : kNaN;
    }
    return c;
}

ExpectedPropertyVector expected_properties(const Matrix& p, const Matrix& w, const Vector& k_ref, const Vector& s_ref,
                                           const Vector& k_norm) {
    const auto n = p.rows();
    check_square(p, n, "expected_properties");
    check_square(w, n, "expected_properties");
    if (k_ref.size() != n || s_ref.size() != n || k_norm.size() != n)
        throw DomainError("expected_properties: dimension mismatch");
    ExpectedPropertyVector e;
    e.k = p.rowwise().sum();
    e.s = w.rowwise().sum();
    e.knn = neighbour_average(p, k_ref, k_norm);
    e.snn = neighbour_average(p, s_ref, k_norm);
    e.clustering = expected_clustering(p);
    e.L = 0.5 * e.k.sum();
    e.W = 0.5 * e.s.sum();
    return e;
}

ExpectedPropertyVector expected_properties_ecm(const EcmSolution& sol, const NetworkSummary& observed) {
    if (sol.size() != observed.n) throw DomainError("expected_properties_ecm: dimension mismatch");
    const Vector k = observed.degree_vector();
    const Vector s = observed.strength_vector();
    return expected_properties(ecm_probability_matrix(sol), ecm_weight_matrix(sol), k, s, k);
}

ExpectedPropertyVector expected_properties_ts(const TsSolution& sol) {
    const Matrix p = ts_probability_matrix(sol);
    const Matrix w = ts_weight_matrix(sol);
    const Vector k = p.rowwise().sum();
    const Vector s = w.rowwise().sum();
    return expected_properties(p, w, k, s, k);
}

ExpectedPropertyVector expected_properties_gdp(const FitnessVector& g, const GdpModelParams& params) {
    return expected_properties_ts(ts_from_gdp(g, params));
}

const StatisticSummary& ComparisonTable::stat(std::string_view name) const {
    for (const auto& s : summary)
        if (s.name == name) return s;
    throw DomainError("ComparisonTable: unknown statistic " + std::string(name));
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("spearman: length mismatch");
    if (a.size() < 2) return kNaN;
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

ComparisonTable compare_reports(const PropertyVector& observed, const ExpectedPropertyVector& expected) {
    if (observed.size() != expected.size()) throw DomainError("compare_reports: node sets are not aligned");
    ComparisonTable table{observed, expected, {}};
    for (std::size_t which = 0; which < kStatisticNames.size(); ++which) {
        const Vector& o = column(observed, which);
        const Vector& e = column(expected, which);
        if (o.size() != e.size()) throw DomainError("compare_reports: node sets are not aligned");
        std::vector<double> ov, ev;
        for (Eigen::Index i = 0; i < o.size(); ++i) {
            if (is_absent(o[i]) || is_absent(e[i])) continue;
            ov.push_back(o[i]);
            ev.push_back(e[i]);
        }
        StatisticSummary s;
        s.name = std::string(kStatisticNames[which]);
        s.used = ov.size();
        double se = 0.0, so = 0.0;
        for (std::size_t i = 0; i < ov.size(); ++i) {
            se += (ov[i] - ev[i]) * (ov[i] - ev[i]);
            so += ov[i] * ov[i];
        }
        if (s.used > 0) {
            s.rmse = std::sqrt(se / static_cast<double>(s.used));
            s.relative_rmse = so > 0.0 ? std::sqrt(se / so) : s.rmse;
        }
        s.spearman = spearman(ov, ev);
        table.summary.push_back(std::move(s));
    }
    return table;
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table, const std::vector<std::string>& node_ids,
                          const Vector& g) {
    const auto n = table.observed.size();
    if (!node_ids.empty() && node_ids.size() != n) throw DomainError("write_comparison_csv: node_ids length mismatch");
    if (g.size() != 0 && static_cast<std::size_t>(g.size()) != n)
        throw DomainError("write_comparison_csv: g length mismatch");
    const auto old_precision = out.precision(17);
    out << "node_id,g,k_obs,k_exp,s_obs,s_exp,knn_obs,knn_exp,snn_obs,snn_exp,c_obs,c_exp\n";
    auto put = [&](double v) {
        out << ',';
        if (std::isnan(v)) out << "nan";
        else out << v;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        out << (node_ids.empty() ? std::to_string(i) : node_ids[i]);
        put(g.size() ? g[ii] : std::numeric_limits<double>::quiet_NaN());
        for (std::size_t which = 0; which < kStatisticNames.size(); ++which) {
            put(column(table.observed, which)[ii]);
            put(column(table.expected, which)[ii]);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace itn
