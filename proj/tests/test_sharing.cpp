#include <doctest.h>

#include <random>

#include "hierfed/field.hpp"
#include "hierfed/random.hpp"
#include "hierfed/sharing.hpp"

using namespace hierfed;

namespace {

std::vector<std::pair<FieldElement, FieldVector>> as_evals(const ShareBundle& shares, const EvaluationPointMap& pts) {
    std::vector<std::pair<FieldElement, FieldVector>> out;
    for (const auto& [k, v] : shares) out.emplace_back(pts.at(k), v);
    return out;
}

}  // namespace

TEST_CASE("pad and split") {
    const FieldConfig f(7);
    auto even = pad_and_split(FieldVector(f, {1, 2, 3, 4}), 2);
    REQUIRE(even.size() == 2);
    CHECK(even[0] == FieldVector(f, {1, 2}));
    CHECK(even[1] == FieldVector(f, {3, 4}));
    auto padded = pad_and_split(FieldVector(f, {1, 2, 3}), 2);
    CHECK(padded[1] == FieldVector(f, {3, 0}));
    auto one = pad_and_split(FieldVector(f, {5, 6}), 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == FieldVector(f, {5, 6}));
}

TEST_CASE("params") {
    CHECK_THROWS_AS(SharingParams(1, 0, 4), SharingError);
    CHECK_THROWS_AS(SharingParams(1, 1, 0), SharingError);
    const SharingParams p(1, 3, 7);
    CHECK(p.block_len() == 3);
    CHECK(p.padded_len() == 9);
    CHECK(p.threshold() == 4);
}

TEST_CASE("evaluation points") {
    const FieldConfig f(7);
    CHECK_THROWS_AS(EvaluationPointMap::sequential(7, f), SharingError);
    const auto pts = EvaluationPointMap::sequential(6, f);
    CHECK(pts.at(0).value() == 1);
    CHECK(pts.at(5).value() == 6);
    CHECK_THROWS_AS(EvaluationPointMap({{0, FieldElement(0, f)}}), SharingError);
    CHECK_THROWS_AS(EvaluationPointMap({{0, FieldElement(2, f)}, {1, FieldElement(2, f)}}), SharingError);
}

TEST_CASE("hand-evaluated shares, q = 7") {
    const FieldConfig f(7);
    const auto pts = EvaluationPointMap::sequential(2, f);
    const std::uint64_t mask[] = {4};
    ScriptedSource rng(mask);
    const auto shares = make_shares(FieldVector(f, {2}), FieldVector(f, {3}), SharingParams(1, 1, 1), pts, rng);
    // f(x) = 5 + 4x
    CHECK(shares.at(0) == FieldVector(f, {2}));
    CHECK(shares.at(1) == FieldVector(f, {6}));
    CHECK(reconstruct_padded(as_evals(shares, pts), SharingParams(1, 1, 1)) == FieldVector(f, {5}));

    const std::uint64_t zero[] = {0};
    ScriptedSource zrng(zero);
    const auto zs = make_shares(FieldVector(f, {0}), FieldVector(f, {0}), SharingParams(1, 1, 1), pts, zrng);
    CHECK(zs.at(0) == FieldVector(f, {0}));
    CHECK(zs.at(1) == FieldVector(f, {0}));
    CHECK(reconstruct_padded(as_evals(zs, pts), SharingParams(1, 1, 1)) == FieldVector(f, {0}));
}

TEST_CASE("hand-evaluated shares, q = 11, two data blocks") {
    const FieldConfig f(11);
    const auto pts = EvaluationPointMap::sequential(3, f);
    const std::uint64_t mask[] = {5};
    ScriptedSource rng(mask);
    const SharingParams p(1, 2, 2);
    const auto shares = make_shares(FieldVector(f, {1, 2}), FieldVector(f, {3, 4}), p, pts, rng);
    // 4 + 6x + 5x^2 at 1, 2, 3
    for (std::uint64_t x = 1; x <= 3; ++x) {
        CHECK(shares.at(x - 1) == FieldVector(f, {(4 + 6 * x + 5 * x * x) % 11}));
    }
    CHECK(shares.at(0) == FieldVector(f, {4}));
    CHECK(shares.at(1) == FieldVector(f, {3}));
    CHECK(shares.at(2) == FieldVector(f, {1}));
    CHECK(reconstruct_padded(as_evals(shares, pts), p) == FieldVector(f, {4, 6}));
}

TEST_CASE("make_shares input checks") {
    const FieldConfig f(7);
    const auto pts = EvaluationPointMap::sequential(2, f);
    SeededSource rng(1);
    CHECK_THROWS_AS(make_shares(FieldVector(f, {1, 2}), FieldVector(f, {1}), SharingParams(1, 1, 2), pts, rng),
                    SharingError);
    CHECK_THROWS_AS(make_shares(FieldVector(f, {1}), FieldVector(f, {1}), SharingParams(2, 1, 1), pts, rng),
                    SharingError);
    std::vector<std::pair<FieldElement, FieldVector>> one = {{pts.at(0), FieldVector(f, {1})}};
    CHECK_THROWS_AS(reconstruct_padded(one, SharingParams(1, 1, 1)), SharingError);
}

TEST_CASE("unmasked sharing draws nothing") {
    const FieldConfig f(11);
    const auto pts = EvaluationPointMap::sequential(3, f);
    CountingSource rng;
    const auto shares = make_shares(FieldVector(f, {1, 2}), FieldVector(f, {3, 4}), SharingParams(1, 2, 2), pts, rng,
                                    false);
    CHECK(rng.count() == 0);
    CHECK(shares.at(0) == FieldVector(f, {10}));  // 4 + 6
}

TEST_CASE("randomized reconstruction") {
    std::mt19937_64 meta(3);
    for (std::uint64_t q : {7, 11}) {
        const FieldConfig f(q);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t d = 1 + meta() % 4;
            const std::size_t nu = 1 + meta() % 2;
            const std::size_t z = meta() % 3;
            const SharingParams p(z, nu, d);
            const auto pts = EvaluationPointMap::sequential(z + nu + meta() % 2, f);
            SeededSource rng(meta());
            const auto g = rng.draw_vector(f, d);
            const auto r = rng.draw_vector(f, d);
            const auto shares = make_shares(g, r, p, pts, rng);
            for (const auto& [k, v] : shares) CHECK(v.size() == p.block_len());
            CHECK(reconstruct_padded(as_evals(shares, pts), p) == g + r);
        }
    }
}

TEST_CASE("exhaustive reconstruction, q = 3, d = 1") {
    const FieldConfig f(3);
    const SharingParams p(1, 1, 1);
    const auto pts = EvaluationPointMap::sequential(2, f);
    for (std::uint64_t g = 0; g < 3; ++g) {
        for (std::uint64_t r = 0; r < 3; ++r) {
            for (std::uint64_t t = 0; t < 3; ++t) {
                const std::uint64_t mask[] = {t};
                ScriptedSource rng(mask);
                const auto shares = make_shares(FieldVector(f, {g}), FieldVector(f, {r}), p, pts, rng);
                CHECK(reconstruct_padded(as_evals(shares, pts), p) == FieldVector(f, {(g + r) % 3}));
            }
        }
    }
}

TEST_CASE("linearity: summed shares decode to the summed secret") {
    const FieldConfig f(101);
    const SharingParams p(2, 2, 5);
    const auto pts = EvaluationPointMap::sequential(4, f);
    SeededSource rng(9);
    const auto g1 = rng.draw_vector(f, 5), r1 = rng.draw_vector(f, 5);
    const auto g2 = rng.draw_vector(f, 5), r2 = rng.draw_vector(f, 5);
    auto s1 = make_shares(g1, r1, p, pts, rng);
    const auto s2 = make_shares(g2, r2, p, pts, rng);
    for (auto& [k, v] : s1) v += s2.at(k);
    CHECK(reconstruct_padded(as_evals(s1, pts), p) == g1 + r1 + g2 + r2);
}

TEST_CASE("inconsistent evaluations are detected") {
    const FieldConfig f(11);
    const SharingParams p(1, 1, 1);
    const auto pts = EvaluationPointMap::sequential(3, f);
    std::vector<std::pair<FieldElement, FieldVector>> ev = {
        {pts.at(0), FieldVector(f, {1})}, {pts.at(1), FieldVector(f, {2})}, {pts.at(2), FieldVector(f, {7})}};
    CHECK_THROWS_AS(reconstruct_padded(ev, p), SharingError);
}
