#include <doctest.h>

#include <set>

#include "hierfed/topology.hpp"

using namespace hierfed;

TEST_CASE("minimal valid instance") {
    const auto t = build_topology(2, 2, {{0, 1}, {0, 1}}, {0, 1}, {0, 1});
    const auto patterns = group_by_pattern(t);
    REQUIRE(patterns.size() == 1);
    CHECK(patterns[0].members == std::vector<std::size_t>{0, 1});
    CHECK(t.nu(0) == 1);
    CHECK(t.cluster(0) == std::vector<std::size_t>{0});
    CHECK(t.cluster(1) == std::vector<std::size_t>{1});
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(build_topology(1, 2, {{0}}, {0}, {0, 1}), TopologyError);         // under-connected
    CHECK_THROWS_AS(build_topology(1, 2, {{0, 1}}, {2}, {0, 1}), TopologyError);      // main out of range
    CHECK_THROWS_AS(build_topology(1, 3, {{0, 1}}, {2}, {0, 1}), TopologyError);      // main not in gamma
    CHECK_THROWS_AS(build_topology(1, 2, {{0, 1}}, {0}, {0, 2}), TopologyError);      // z_bs >= B
    CHECK_THROWS_AS(build_topology(1, 2, {{0, 0}}, {0}, {0, 0}), TopologyError);      // duplicate station
    CHECK_THROWS_AS(build_topology(1, 2, {{0, 5}}, {0}, {0, 0}), TopologyError);      // station out of range
    CHECK_THROWS_AS(build_topology(2, 2, {{0, 1}}, {0, 0}, {0, 0}), TopologyError);   // size mismatch
    CHECK_THROWS_AS(build_topology(0, 2, {}, {}, {0, 0}), TopologyError);
}

TEST_CASE("grouping by pattern") {
    const auto t = build_topology(3, 3, {{1, 0}, {0, 1}, {1, 2}}, {0, 0, 1}, {0, 1});
    CHECK(t.gamma(0) == StationSet{0, 1});
    const auto patterns = group_by_pattern(t);
    REQUIRE(patterns.size() == 2);
    CHECK(patterns[0].pattern == StationSet{0, 1});
    CHECK(patterns[0].members == std::vector<std::size_t>{0, 1});
    CHECK(patterns[1].pattern == StationSet{1, 2});
    CHECK(patterns[1].members == std::vector<std::size_t>{2});
    CHECK(t.gamma_string() == "1,2; 1,2; 2,3");
    CHECK(t.main_bs_string() == "1,1,2");
    CHECK(format_station_set(patterns[1].pattern) == "{2,3}");

    const auto same = build_topology(3, 2, {{0, 1}, {0, 1}, {0, 1}}, {0, 0, 1}, {0, 1});
    CHECK(group_by_pattern(same).size() == 1);
    const auto distinct = build_topology(3, 3, {{0, 1}, {0, 2}, {1, 2}}, {0, 0, 1}, {0, 1});
    CHECK(group_by_pattern(distinct).size() == 3);
}

TEST_CASE("generator determinism and full connectivity") {
    CHECK(random_topology(6, 5, 1, 2, 17) == random_topology(6, 5, 1, 2, 17));
    CHECK_FALSE(random_topology(6, 5, 1, 2, 17) == random_topology(6, 5, 1, 2, 18));
    const auto full = random_topology(5, 4, 1, 3, 3);
    for (std::size_t i = 0; i < 5; ++i) CHECK(full.gamma(i) == StationSet{0, 1, 2, 3});
    CHECK_THROWS_AS(random_topology(2, 3, 1, 3, 0), TopologyError);
}

TEST_CASE("golden generator fixture") {
    const auto t = random_topology(4, 3, 1, 1, 0);
    CHECK(t.gamma_string() == "1,3; 1,2; 1,2; 1,3");
    CHECK(t.main_bs_string() == "3,1,1,1");
    CHECK(group_by_pattern(t).size() == 2);
}

TEST_CASE("partition and cluster invariants over many generated topologies") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto t = random_mixed_topology(1 + seed % 8, 2 + seed % 4, seed % 2, seed);
        std::multiset<std::size_t> covered;
        for (const auto& p : group_by_pattern(t)) {
            for (auto i : p.members) {
                covered.insert(i);
                CHECK(t.gamma(i) == p.pattern);
            }
        }
        std::size_t cluster_total = 0;
        for (std::size_t m = 0; m < t.n_bs(); ++m) cluster_total += t.cluster(m).size();
        CHECK(cluster_total == t.n_clients());
        CHECK(covered.size() == t.n_clients());
        for (std::size_t i = 0; i < t.n_clients(); ++i) {
            CHECK(covered.count(i) == 1);
            CHECK(t.nu(i) >= 1);
        }
    }
}
