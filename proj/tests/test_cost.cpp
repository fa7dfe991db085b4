#include <doctest.h>

#include "hierfed/cost.hpp"
#include "hierfed/protocol.hpp"
#include "hierfed/random.hpp"
#include "hierfed/topology.hpp"

using namespace hierfed;

namespace {

Topology uniform_topology(std::size_t n, std::size_t b, std::size_t z, StationSet gamma) {
    std::vector<StationSet> g(n, gamma);
    std::vector<std::size_t> main(n, gamma.front());
    return build_topology(n, b, g, main, {0, z});
}

Rational frac(long long num, long long den) { return Rational(num) / Rational(den); }

StationSet range_set(std::size_t n) {
    StationSet s;
    for (std::size_t k = 0; k < n; ++k) s.push_back(k);
    return s;
}

RoundResult random_round(const Topology& t, std::uint64_t q, std::size_t d, std::uint64_t seed) {
    const FieldConfig f(q);
    SeededSource gen(seed);
    std::vector<FieldVector> g;
    for (std::size_t i = 0; i < t.n_clients(); ++i) g.push_back(gen.draw_vector(f, d));
    return run_round(t, g, f, seed + 1);
}

}  // namespace

TEST_CASE("decimal rendering") {
    CHECK(to_decimal(frac(901, 100)) == "9.01");
    CHECK(to_decimal(frac(10001, 2500)) == "4.0004");
    CHECK(to_decimal(Rational(3)) == "3");
    CHECK(to_decimal(frac(1, 3)) == "0.333333333333333");
    CHECK(to_decimal(frac(2, 3)) == "0.666666666666667");
    CHECK(to_decimal(frac(-1, 8)) == "-0.125");
    CHECK(to_decimal(frac(2, 3), 3) == "0.667");
    CHECK(to_decimal(frac(99999, 10000), 3) == "10");
    CHECK(to_decimal(Rational(0)) == "0");
}

TEST_CASE("client uplink cost") {
    CHECK(predict_c_ue(uniform_topology(2, 2, 1, {0, 1}), 4) == 24);
    CHECK(predict_c_ue(uniform_topology(3, 1, 0, {0}), 4) == 24);
    CHECK(predict_c_ue(uniform_topology(10000, 100, 3, {0, 1, 2, 3}), 1000000) == 50000000000ULL);
    // d = 3, nu = 2: shares of ceil(3/2) = 2 symbols.
    CHECK(predict_c_ue(uniform_topology(1, 3, 1, {0, 1, 2}), 3) == 3 * 2 + 3);
}

TEST_CASE("chain cost") {
    CHECK(predict_c_bs(uniform_topology(1, 2, 0, {0}), 4) == 4);
    CHECK(predict_c_bs(uniform_topology(1, 1, 0, {0}), 100) == 0);
    CHECK(predict_c_bs(uniform_topology(1, 100, 3, {0, 1, 2, 3}), 1000000) == 99000000);
}

TEST_CASE("base station to federator cost") {
    CHECK(predict_c_bsf(uniform_topology(2, 2, 1, {0, 1}), 4) == 12);
    const auto two = build_topology(2, 3, {{0, 1}, {1, 2}}, {0, 1}, {0, 1});
    CHECK(predict_c_bsf(two, 4) == 20);
    // Full pattern with z = 3, B = 100: nu = 97 does not divide 10^6, so each
    // of the 100 aggregates carries ceil(10^6 / 97) = 10310 symbols.
    const auto full = uniform_topology(3, 100, 3, range_set(100));
    CHECK(predict_c_bsf(full, 1000000) == 1000000 + 100 * 10310);
    CHECK(Rational(predict_c_bsf(full, 1000000)) >= Rational(1000000) + frac(100000000, 97));
    CHECK(predict_c_bsf(full, 97 * 1000) == 97 * 1000 + 100 * 1000);
}

TEST_CASE("closed-form lower bound") {
    CHECK(predict_c_min(uniform_topology(2, 2, 1, {0, 1}), 4) == Rational(24));
    CHECK(predict_c_min(uniform_topology(5, 3, 0, {1}), 7) == Rational(7 * 6));
    const auto big = uniform_topology(10000, 100, 3, {0, 1, 2, 3});
    CHECK(predict_c_min(big, 1000000) / Rational(10000LL * 1000000LL) == frac(40004, 10000));
    CHECK(predict_c_min_curve(10000, 100, 3, 1, 1000000) / Rational(10000LL * 1000000LL) == frac(401, 100));
}

TEST_CASE("loose bounds") {
    const auto b = predict_loose_bounds(10000, 100, 3, 1000000);
    const Rational nd(10000LL * 1000000LL);
    CHECK(b.upper / nd == frac(901, 100));
    CHECK(b.lower / nd == Rational(1) + frac(1, 100) + frac(10001, 10000) * frac(100, 97));
    CHECK(to_decimal(b.lower / nd, 5) == "2.041");
    const auto z0 = predict_loose_bounds(10, 4, 0, 5);
    CHECK(z0.upper == Rational(5 * (10 + 4 + 2 * 10)));
    CHECK(ratio_bound(10, 5, 1) == Rational(3) + frac(4, 11));
}

TEST_CASE("beta extremes") {
    // One shared full pattern: beta = (N+1)/N.
    const auto shared = uniform_topology(4, 3, 1, {0, 1, 2});
    const auto r1 = random_round(shared, 101, 6, 1);
    CHECK(compute_beta(shared, measure(r1.log), 6) == frac(5, 4));
    // N = 1: beta = 2 for any topology.
    const auto single = build_topology(1, 4, {{0, 2, 3}}, {2}, {0, 1});
    const auto r2 = random_round(single, 101, 4, 2);
    CHECK(compute_beta(single, measure(r2.log), 4) == Rational(2));
    // Pairwise-distinct patterns, same nu: beta = 2.
    const auto distinct = build_topology(3, 3, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1}, {0, 1});
    const auto r3 = random_round(distinct, 101, 4, 3);
    CHECK(compute_beta(distinct, measure(r3.log), 4) == Rational(2));
}

TEST_CASE("measure") {
    const auto t = build_topology(3, 3, {{0, 1}, {0, 1}, {1, 2}}, {0, 0, 1}, {0, 1});
    const auto res = random_round(t, 13, 2, 5);
    const auto rep = measure(res.log, t);
    CHECK(rep.c_ue == predict_c_ue(t, 2));
    CHECK(rep.c_bs == predict_c_bs(t, 2));
    CHECK(rep.c_bsf == predict_c_bsf(t, 2));
    CHECK(rep.c_total == rep.c_ue + rep.c_bs + rep.c_bsf);
    CHECK(rep.matches_prediction());
    // Hand count: 3 clients x (2 shares of 2 symbols + 2 key symbols) = 18,
    // chain 2 x 2 = 4, two patterns x 2 aggregates x 2 symbols plus the key.
    CHECK(rep.c_ue == 18);
    CHECK(rep.c_bs == 4);
    CHECK(rep.c_bsf == 10);

    const auto empty = measure(MessageLog(res.log.header()));
    CHECK(empty.c_ue == 0);
    CHECK(empty.c_bs == 0);
    CHECK(empty.c_bsf == 0);
    CHECK(empty.c_total == 0);

    const FieldConfig f(13);
    SeededSource gen(5);
    std::vector<FieldVector> g;
    for (int i = 0; i < 3; ++i) g.push_back(gen.draw_vector(f, 2));
    const auto broken = measure(run_round_broken_no_masks(t, g, f, 6).log, t);
    CHECK(broken.c_ue == rep.c_ue);
    CHECK(broken.c_bs == rep.c_bs);
    CHECK(broken.c_bsf == rep.c_bsf);
}

TEST_CASE("bounds hold on uniform topologies with nu dividing d") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t b = 2 + seed % 4;
        const std::size_t z = seed % 2;
        const std::size_t nu = 1 + seed % (b - z);
        const std::size_t n = 1 + seed % 7;
        const std::size_t d = 60;
        const auto t = random_topology(n, b, z, nu, seed);
        const auto rep = measure(random_round(t, 101, d, seed).log, t);
        CHECK(rep.matches_prediction());
        CHECK(Rational(rep.c_total) >= rep.c_min);
        CHECK(Rational(rep.c_total) <= rep.loose_upper);
        CHECK(Rational(rep.c_total) / rep.c_min < rep.ratio_bound);
        CHECK(rep.beta >= Rational(n + 1) / Rational(n));
        CHECK(rep.beta <= Rational(2));
    }
}

TEST_CASE("cost sweep values") {
    const auto rows = sweep_costs(10000, 100, 3, 1000000, 1, 25);
    REQUIRE(rows.size() == 25);
    const auto row = [&](std::size_t nu) { return rows.at(nu - 1); };
    CHECK(to_decimal(row(1).upper_norm) == "9.01");
    CHECK(to_decimal(row(2).upper_norm) == "6.01");
    CHECK(to_decimal(row(5).upper_norm) == "4.21");
    CHECK(to_decimal(row(25).upper_norm) == "3.25");
    CHECK(to_decimal(row(1).tight_lower_norm) == "5.0104");
    CHECK(to_decimal(row(2).tight_lower_norm) == "3.51025");
    CHECK(to_decimal(row(5).tight_lower_norm) == "2.61016");
    CHECK(to_decimal(row(25).tight_lower_norm) == "2.130112");
    CHECK(to_decimal(row(1).c_min_norm) == "4.0004");
    CHECK(to_decimal(row(1).c_min_curve_norm) == "4.01");
    CHECK(to_decimal(row(25).c_min_curve_norm) == "1.13");

    CHECK(sweep_costs(10000, 100, 3, 1000000, 1, 1).size() == 1);
    CHECK_THROWS_AS(sweep_costs(10000, 100, 3, 1000000, 1, 98), CostError);
    const auto csv = sweep_csv(sweep_costs(10000, 100, 3, 1000000, 1, 2));
    CHECK(csv == "nu,c_min_norm,tight_lower_norm,upper_norm\n1,4.0004,5.0104,9.01\n2,2.50025,3.51025,6.01\n");
}
