#include <doctest.h>

#include <random>
#include <sstream>

#include "itn/errors.hpp"
#include "itn/trade_data.hpp"
#include "oracles.hpp"

using namespace itn;

TEST_CASE("load_country_table reads rows, drops nonpositive gdp") {
    std::istringstream in("# comment\ncountry_id,year,gdp\nA,2000,1.0\nB,2000,2.0\nC,2000,3.0\n");
    const auto t = load_country_table(in);
    CHECK(t.size() == 3);
    CHECK(t.entries[1].id == "B");
    CHECK(t.entries[2].gdp == 3.0);
    CHECK(t.year == 2000);
    CHECK(t.warning_count() == 0);

    std::istringstream zero("A,2000,1.0\nZ,2000,0\nB,2000,2\n");
    const auto tz = load_country_table(zero);
    CHECK(tz.size() == 2);
    CHECK(tz.warning_count() == 1);
    REQUIRE(tz.dropped_ids.size() == 1);
    CHECK(tz.dropped_ids[0] == "Z");

    std::istringstream missing("A,2000,1.0\nM,2000,\nN,2000,NA\n");
    const auto tm = load_country_table(missing);
    CHECK(tm.size() == 1);
    CHECK(tm.dropped_ids == std::vector<std::string>{"M", "N"});
}

TEST_CASE("load_country_table errors") {
    std::istringstream dup("USA,2000,1\nUSA,2000,2\n");
    CHECK_THROWS_AS(load_country_table(dup), ValidationError);

    std::istringstream bad("A,2000,1\nB,2000,abc\n");
    try {
        load_country_table(bad, std::nullopt, "gdp.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("gdp.csv:2") != std::string::npos);
    }

    std::istringstream short_row("A,2000\n");
    CHECK_THROWS_AS(load_country_table(short_row), ParseError);

    std::istringstream two_years("A,1990,1\nA,2000,2\n");
    CHECK_THROWS_AS(load_country_table(two_years), ValidationError);
    std::istringstream two_years_again("A,1990,1\nA,2000,2\nB,2000,4\n");
    const auto t = load_country_table(two_years_again, 2000);
    CHECK(t.size() == 2);
}

TEST_CASE("rescale_gdp examples") {
    const std::vector<double> gdp{1, 2, 3};
    const auto f = rescale_gdp(std::span<const double>(gdp));
    CHECK(f.g[0] == doctest::Approx(1.0 / 6).epsilon(1e-15));
    CHECK(f.g[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(f.g[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.g_tilde[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.g_tilde[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f.g_tilde[2] == doctest::Approx(1.5).epsilon(1e-15));

    const std::vector<double> one{5};
    const auto f1 = rescale_gdp(std::span<const double>(one));
    CHECK(f1.g[0] == 1.0);
    CHECK(f1.g_tilde[0] == 1.0);

    const std::vector<double> same{7.5, 7.5, 7.5, 7.5};
    const auto f4 = rescale_gdp(std::span<const double>(same));
    for (int i = 0; i < 4; ++i) CHECK(f4.g[i] == 0.25);

    CHECK_THROWS_AS(rescale_gdp(std::span<const double>()), DomainError);
}

TEST_CASE("rescale_gdp properties: normalisation, g_tilde = n g, scale invariance") {
    std::mt19937_64 rng(11);
    std::lognormal_distribution<double> dist(20.0, 2.0);
    for (std::size_t n : {1u, 2u, 17u, 1000u, 10000u}) {
        std::vector<double> gdp(n);
        for (auto& v : gdp) v = dist(rng);
        const auto f = rescale_gdp(std::span<const double>(gdp));
        CHECK(std::abs(f.g.sum() - 1.0) <= 1e-12);
        CHECK((f.g.array() > 0.0).all());
        CHECK((f.g.array() <= 1.0).all());
        CHECK((f.g_tilde - static_cast<double>(n) * f.g).cwiseAbs().maxCoeff() == 0.0);

        std::vector<double> scaled = gdp;
        for (auto& v : scaled) v *= 3.7e5;
        const auto fs = rescale_gdp(std::span<const double>(scaled));
        CHECK((fs.g - f.g).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("build_network averages, rounds and scales") {
    const std::vector<Flow> avg{{0, 1, 4.0}, {1, 0, 2.0}};
    const auto net = build_network(avg, 2, 1.0);
    CHECK(net.weight(0, 1) == 3);
    CHECK(net.weight(1, 0) == 3);

    const std::vector<Flow> tiny{{0, 1, 0.2}};
    const auto net2 = build_network(tiny, 2, 1.0);
    CHECK(net2.weight(0, 1) == 0);
    CHECK_FALSE(net2.linked(0, 1));

    const std::vector<Flow> unit{{0, 1, 10}, {0, 2, 10}};
    const auto net3 = build_network(unit, 3, 5.0);
    CHECK(net3.weight(0, 1) == 1);
    CHECK(net3.weight(0, 2) == 1);

    // Half-up: (1 + 0) / 2 = 0.5 rounds to 1.
    const std::vector<Flow> half{{0, 1, 1.0}};
    CHECK(build_network(half, 2, 1.0).weight(0, 1) == 1);

    const std::vector<Flow> self{{1, 1, 50.0}};
    CHECK(build_network(self, 2, 1.0).weight(1, 1) == 0);

    const std::vector<Flow> out_of_range{{0, 3, 1.0}};
    CHECK_THROWS_AS(build_network(out_of_range, 3, 1.0), ValidationError);
    const std::vector<Flow> negative{{0, 1, -1.0}};
    CHECK_THROWS_AS(build_network(negative, 2, 1.0), ValidationError);
}

TEST_CASE("summarize hand-counted graphs") {
    WeightMatrix tri = WeightMatrix::Constant(3, 3, 2);
    tri.diagonal().setZero();
    const auto s = summarize(WeightedNetwork(tri));
    CHECK(s.degree == std::vector<std::int64_t>{2, 2, 2});
    CHECK(s.strength == std::vector<std::int64_t>{4, 4, 4});
    CHECK(s.link_count == 3);
    CHECK(s.total_weight == 6);

    const auto empty = summarize(WeightedNetwork(WeightMatrix::Zero(4, 4)));
    CHECK(empty.degree == std::vector<std::int64_t>{0, 0, 0, 0});
    CHECK(empty.strength == std::vector<std::int64_t>{0, 0, 0, 0});
    CHECK(empty.link_count == 0);
    CHECK(empty.total_weight == 0);

    WeightMatrix path = WeightMatrix::Zero(3, 3);
    path(0, 1) = path(1, 0) = 1;
    path(1, 2) = path(2, 1) = 3;
    const auto p = summarize(WeightedNetwork(path));
    CHECK(p.degree == std::vector<std::int64_t>{1, 2, 1});
    CHECK(p.strength == std::vector<std::int64_t>{1, 4, 3});
    CHECK(p.link_count == 2);
    CHECK(p.total_weight == 4);
}

TEST_CASE("build_network then summarize keeps the handshake identities") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> node(0, 29);
    std::exponential_distribution<double> size(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Flow> flows(200);
        for (auto& f : flows) f = {node(rng), node(rng), size(rng)};
        const auto net = build_network(flows, 30, 0.7);
        const auto s = summarize(net);
        std::int64_t ksum = 0, ssum = 0;
        for (std::size_t i = 0; i < s.n; ++i) {
            ksum += s.degree[i];
            ssum += s.strength[i];
            CHECK(s.degree[i] <= static_cast<std::int64_t>(s.n - 1));
            CHECK(s.strength[i] >= s.degree[i]);
        }
        CHECK(ksum == 2 * s.link_count);
        CHECK(ssum == 2 * s.total_weight);
    }
}

TEST_CASE("WeightedNetwork rejects asymmetric or looped matrices") {
    WeightMatrix w = WeightMatrix::Zero(2, 2);
    w(0, 1) = 1;
    CHECK_THROWS_AS(WeightedNetwork{w}, ValidationError);
    WeightMatrix loop = WeightMatrix::Zero(2, 2);
    loop(0, 0) = 1;
    CHECK_THROWS_AS(WeightedNetwork{loop}, ValidationError);
}

TEST_CASE("flow loading and joining") {
    std::istringstream gdp("A,2000,1\nB,2000,2\nC,2000,0\nD,2000,4\n");
    const auto table = load_country_table(gdp);
    std::istringstream flows_in("src_id,dst_id,flow\nA,B,4\nB,A,2\nA,C,10\nD,B,1\n");
    const auto flows = load_flows(flows_in);
    REQUIRE(flows.size() == 4);
    const auto data = join_flows(table, flows, 1.0);
    CHECK(data.network.size() == 3);
    CHECK(data.network.weight(0, 1) == 3);
    CHECK(data.network.weight(1, 2) == 1);  // (1 + 0) / 2 rounds half-up
    CHECK(data.warnings.size() == 2);       // dropped row + dropped flows
    CHECK(data.fitness.size() == 3);

    std::istringstream unknown_in("A,XYZ,3\n");
    const auto unknown = load_flows(unknown_in);
    CHECK_THROWS_AS(join_flows(table, unknown, 1.0), ValidationError);

    std::istringstream bad_in("A,B\n");
    CHECK_THROWS_AS(load_flows(bad_in), ParseError);
}

TEST_CASE("dense and triple export, triple import") {
    std::mt19937_64 rng(3);
    const auto net = oracle::random_network(rng, 12, 0.4, 1, 9);
    std::stringstream triples;
    write_triples(triples, net);
    const auto back = read_triples(triples, 12);
    CHECK(back.weights() == net.weights());

    std::stringstream dense;
    write_dense(dense, net);
    std::string first;
    std::getline(dense, first);
    CHECK(std::count(first.begin(), first.end(), ',') == 11);
}
