#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "itn/errors.hpp"
#include "itn/likelihood_solvers.hpp"
#include "itn/net_properties.hpp"
#include "oracles.hpp"

using namespace itn;

namespace {

WeightedNetwork triangle(std::int64_t w) {
    WeightMatrix m = WeightMatrix::Constant(3, 3, w);
    m.diagonal().setZero();
    return WeightedNetwork(m);
}

WeightedNetwork star4() {
    WeightMatrix m = WeightMatrix::Zero(4, 4);
    for (int j = 1; j < 4; ++j) m(0, j) = m(j, 0) = 1;
    return WeightedNetwork(m);
}

WeightedNetwork path3() {
    WeightMatrix m = WeightMatrix::Zero(3, 3);
    m(0, 1) = m(1, 0) = 1;
    m(1, 2) = m(2, 1) = 3;
    return WeightedNetwork(m);
}

// Clustering by explicit triple enumeration.
double clustering_oracle(const WeightedNetwork& net, std::size_t i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < net.size(); ++j)
        if (net.linked(i, j)) nb.push_back(j);
    if (nb.size() < 2) return NAN;
    double closed = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
        for (std::size_t b = a + 1; b < nb.size(); ++b) closed += net.linked(nb[a], nb[b]) ? 1 : 0;
    return closed / (0.5 * static_cast<double>(nb.size() * (nb.size() - 1)));
}

}  // namespace

TEST_CASE("empirical statistics on the hand-enumerated suite") {
    const auto tri = empirical_properties(triangle(1));
    for (int i = 0; i < 3; ++i) {
        CHECK(tri.clustering[i] == 1.0);
        CHECK(tri.knn[i] == 2.0);
        CHECK(tri.snn[i] == 2.0);
    }
    CHECK(tri.L == 3.0);
    CHECK(tri.W == 3.0);

    const auto star = empirical_properties(star4());
    CHECK(star.knn[0] == 1.0);
    for (int i = 1; i < 4; ++i) {
        CHECK(star.knn[i] == 3.0);
        CHECK(is_absent(star.clustering[i]));
    }
    CHECK(star.clustering[0] == 0.0);

    const auto path = empirical_properties(path3());
    CHECK(path.snn[1] == 2.0);
    CHECK(path.knn[1] == 1.0);
    CHECK(path.knn[0] == 2.0);
    CHECK(path.snn[0] == 4.0);
    CHECK(path.snn[2] == 4.0);

    const auto empty = empirical_properties(WeightedNetwork(WeightMatrix::Zero(3, 3)));
    for (int i = 0; i < 3; ++i) {
        CHECK(empty.k[i] == 0.0);
        CHECK(is_absent(empty.knn[i]));
        CHECK(is_absent(empty.snn[i]));
        CHECK(is_absent(empty.clustering[i]));
    }
}

TEST_CASE("empirical clustering agrees with triple enumeration") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = oracle::random_network(rng, 20, 0.3, 1, 5);
        const auto props = empirical_properties(net);
        for (std::size_t i = 0; i < 20; ++i) {
            const double want = clustering_oracle(net, i);
            const double got = props.clustering[static_cast<Eigen::Index>(i)];
            if (std::isnan(want)) CHECK(is_absent(got));
            else CHECK(got == doctest::Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("homogeneous expected clustering equals p") {
    for (double p : {0.01, 1.0 / 3, 0.5, 0.97}) {
        for (Eigen::Index n : {3, 4, 10, 57}) {
            Matrix m = Matrix::Constant(n, n, p);
            m.diagonal().setZero();
            const Vector c = expected_clustering(m);
            for (Eigen::Index i = 0; i < n; ++i) CHECK(std::abs(c[i] - p) <= 1e-12);
        }
    }
}

TEST_CASE("ecm expectations reproduce the constraints") {
    const auto sym = oracle::perfect_matching(2);
    const auto summary = summarize(sym);
    const auto [sol, rep] = solve_ecm(summary);
    REQUIRE(rep.converged);
    const auto e = expected_properties_ecm(sol, summary);
    for (int i = 0; i < 4; ++i) {
        CHECK(e.clustering[i] == doctest::Approx(1.0 / 3).epsilon(1e-8));
        CHECK(e.k[i] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(e.s[i] == doctest::Approx(2.0).epsilon(1e-8));
    }

    std::mt19937_64 rng(4);
    const auto net = oracle::random_network(rng, 30, 0.2, 1, 12);
    const auto s = summarize(net);
    const auto [ecm, r] = solve_ecm(s);
    REQUIRE(r.converged);
    const auto table = compare_reports(empirical_properties(net), expected_properties_ecm(ecm, s));
    CHECK(table.stat("k").relative_rmse <= 1e-8);
    CHECK(table.stat("s").relative_rmse <= 1e-8);

    const Matrix zero = Matrix::Zero(3, 3);
    const auto ez = expected_properties(zero, zero, Vector::Zero(3), Vector::Zero(3), Vector::Zero(3));
    for (int i = 0; i < 3; ++i) {
        CHECK(ez.k[i] == 0.0);
        CHECK(ez.s[i] == 0.0);
        CHECK(is_absent(ez.knn[i]));
        CHECK(is_absent(ez.clustering[i]));
    }
}

TEST_CASE("two-step homogeneous closed form") {
    const Eigen::Index n = 7;
    const double z = 0.8;
    const double q = z * z / (1 + z * z);
    TsSolution sol{Vector::Constant(n, z), Vector::Constant(n, 0.3)};
    const auto e = expected_properties_ts(sol);
    for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(e.clustering[i] == doctest::Approx(q).epsilon(1e-12));
        CHECK(e.knn[i] == doctest::Approx(static_cast<double>(n - 1) * q).epsilon(1e-12));
    }

    sol.z[2] = 0.0;
    const auto e2 = expected_properties_ts(sol);
    CHECK(e2.k[2] == 0.0);
    CHECK(is_absent(e2.knn[2]));
}

TEST_CASE("compare_reports self-comparison and permutation invariance") {
    std::mt19937_64 rng(8);
    const auto net = oracle::random_network(rng, 25, 0.25, 1, 9);
    const auto props = empirical_properties(net);
    const auto self = compare_reports(props, props);
    for (const auto& s : self.summary) {
        CHECK(s.rmse == 0.0);
        CHECK(s.relative_rmse == 0.0);
    }
    CHECK(self.summary.size() == kStatisticNames.size());
    CHECK_THROWS_AS(self.stat("nope"), DomainError);

    const auto [ts, rep] = solve_ts(summarize(net));
    REQUIRE(rep.converged);
    const auto expected = expected_properties_ts(ts);

    std::vector<Eigen::Index> perm(25);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto permute = [&](const PropertyVector& p) {
        PropertyVector out = p;
        for (Eigen::Index i = 0; i < 25; ++i) {
            out.k[i] = p.k[perm[i]];
            out.s[i] = p.s[perm[i]];
            out.knn[i] = p.knn[perm[i]];
            out.snn[i] = p.snn[perm[i]];
            out.clustering[i] = p.clustering[perm[i]];
        }
        return out;
    };
    const auto a = compare_reports(props, expected);
    const auto b = compare_reports(permute(props), permute(expected));
    for (std::size_t i = 0; i < a.summary.size(); ++i) {
        CHECK(a.summary[i].used == b.summary[i].used);
        CHECK(b.summary[i].rmse == doctest::Approx(a.summary[i].rmse).epsilon(1e-12));
        CHECK(b.summary[i].spearman == doctest::Approx(a.summary[i].spearman).epsilon(1e-12));
    }
    CHECK(a.stat("k").relative_rmse <= 1e-8);
    CHECK(a.stat("s").relative_rmse <= 1e-8);
}

TEST_CASE("spearman uses average ranks") {
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    // Ranks (1.5, 1.5, 3) against (1, 2, 3).
    CHECK(spearman({5, 5, 9}, {1, 2, 3}) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    CHECK(std::isnan(spearman({1}, {1})));
    CHECK(std::isnan(spearman({2, 2, 2}, {1, 2, 3})));
}

TEST_CASE("comparison csv") {
    const auto props = empirical_properties(star4());
    const auto table = compare_reports(props, props);
    std::ostringstream out;
    write_comparison_csv(out, table, {"A", "B", "C", "D"}, Vector::Constant(4, 0.25));
    std::istringstream in(out.str());
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header == "node_id,g,k_obs,k_exp,s_obs,s_exp,knn_obs,knn_exp,snn_obs,snn_exp,c_obs,c_exp");
    CHECK(row0 == "A,0.25,3,3,3,3,1,1,1,1,0,0");
    CHECK(row1 == "B,0.25,1,1,1,1,3,3,3,3,nan,nan");
}
