#include <doctest.h>

#include <random>
#include <vector>

#include "hierfed/field.hpp"

using namespace hierfed;

namespace {

// Brute-force inverse: the b in [1, q) with a*b = 1.
std::uint64_t brute_inverse(std::uint64_t a, std::uint64_t q) {
    for (std::uint64_t b = 1; b < q; ++b) {
        if (a * b % q == 1) return b;
    }
    return 0;
}

FieldElement fe(std::uint64_t v, std::uint64_t q) { return FieldElement(v, FieldConfig(q)); }

}  // namespace

TEST_CASE("field config rejects composites") {
    CHECK_THROWS_AS(FieldConfig(4), FieldError);
    CHECK_THROWS_AS(FieldConfig(1), FieldError);
    CHECK_THROWS_AS(FieldConfig(0), FieldError);
    CHECK_THROWS_AS(FieldConfig(561), FieldError);  // Carmichael
    CHECK_NOTHROW(FieldConfig(2));
    CHECK_NOTHROW(FieldConfig(FieldConfig::kMersenne61));
    CHECK(FieldConfig().modulus() == (1ULL << 31) - 1);
}

TEST_CASE("primality agrees with trial division") {
    for (std::uint64_t n = 0; n < 5000; ++n) {
        bool prime = n >= 2;
        for (std::uint64_t k = 2; k * k <= n && prime; ++k) prime = n % k != 0;
        CHECK_MESSAGE(is_prime(n) == prime, n);
    }
}

TEST_CASE("addition and multiplication") {
    CHECK((fe(3, 7) + fe(5, 7)).value() == 1);
    CHECK((fe(0, 7) + fe(4, 7)).value() == 4);
    CHECK((fe(10, 11) + fe(10, 11)).value() == 9);
    CHECK((fe(3, 7) * fe(5, 7)).value() == 1);
    CHECK((fe(1, 7) * fe(6, 7)).value() == 6);
    CHECK((fe(7, 11) * fe(8, 11)).value() == 1);
    CHECK(brute_inverse(7, 11) == 8);
    CHECK((fe(2, 7) - fe(5, 7)).value() == 4);
    CHECK(ff_neg(fe(0, 7)).value() == 0);
    CHECK(FieldElement::from_signed(-1, FieldConfig(7)).value() == 6);
}

TEST_CASE("modulus mismatch is an error") {
    CHECK_THROWS_AS(ff_add(fe(1, 7), fe(1, 11)), FieldError);
    CHECK_THROWS_AS(ff_mul(fe(1, 7), fe(1, 11)), FieldError);
    FieldVector a(FieldConfig(7), 2);
    FieldVector b(FieldConfig(11), 2);
    CHECK_THROWS_AS(a += b, FieldError);
}

TEST_CASE("inverses match brute force") {
    CHECK(ff_inv(fe(3, 7)).value() == 5);
    CHECK(ff_inv(fe(1, 7)).value() == 1);
    CHECK(ff_inv(fe(5, 13)).value() == 8);
    CHECK_THROWS_AS(ff_inv(fe(0, 7)), FieldError);
    for (std::uint64_t q : {2, 3, 5, 7, 11, 13, 101}) {
        for (std::uint64_t a = 1; a < q; ++a) CHECK(ff_inv(fe(a, q)).value() == brute_inverse(a, q));
    }
}

TEST_CASE("field axioms on random triples") {
    std::mt19937_64 rng(7);
    for (std::uint64_t q : {std::uint64_t{3}, std::uint64_t{101}, FieldConfig::kMersenne31, FieldConfig::kMersenne61}) {
        const FieldConfig f(q);
        for (int trial = 0; trial < 200; ++trial) {
            const FieldElement a(rng(), f), b(rng(), f), c(rng(), f);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a + b == b + a);
            CHECK(a * b == b * a);
            CHECK(a * (b + c) == a * b + a * c);
            if (!a.is_zero()) CHECK((a * ff_inv(a)).value() == 1);
        }
    }
}

TEST_CASE("horner evaluation") {
    const FieldConfig f(7);
    const FieldVector coeffs(f, {5, 4});
    CHECK(poly_eval(coeffs, FieldElement(1, f)).value() == 2);
    CHECK(poly_eval(coeffs, FieldElement(0, f)).value() == 5);
    CHECK(poly_eval(coeffs, FieldElement(2, f)).value() == 6);
}

TEST_CASE("interpolation: degree-1 example matches brute force over all 49 lines") {
    const std::uint64_t q = 7;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> matches;
    for (std::uint64_t c0 = 0; c0 < q; ++c0) {
        for (std::uint64_t c1 = 0; c1 < q; ++c1) {
            if ((c0 + c1) % q == 2 && (c0 + 2 * c1) % q == 6) matches.emplace_back(c0, c1);
        }
    }
    REQUIRE(matches.size() == 1);

    const FieldConfig f(q);
    const std::vector<std::pair<FieldElement, FieldElement>> pts = {{fe(1, q), fe(2, q)}, {fe(2, q), fe(6, q)}};
    CHECK(lagrange_interpolate(pts, 2) == FieldVector(f, {matches[0].first, matches[0].second}));
}

TEST_CASE("interpolation examples") {
    const FieldConfig f7(7);
    const std::vector<std::pair<FieldElement, FieldElement>> flat = {{fe(1, 7), fe(3, 7)}, {fe(2, 7), fe(3, 7)}};
    CHECK(lagrange_interpolate(flat, 2) == FieldVector(f7, {3, 0}));

    // Oracle: 1 + 3x + 2x^2 evaluated by hand-rolled arithmetic.
    const std::uint64_t q = 11;
    std::vector<std::pair<FieldElement, FieldElement>> pts;
    for (std::uint64_t x = 1; x <= 3; ++x) pts.emplace_back(fe(x, q), fe((1 + 3 * x + 2 * x * x) % q, q));
    CHECK(pts[0].second.value() == 6);
    CHECK(pts[1].second.value() == 4);
    CHECK(pts[2].second.value() == 6);
    CHECK(lagrange_interpolate(pts, 3) == FieldVector(FieldConfig(q), {1, 3, 2}));

    // (1,6), (2,9), (3,3) lie on 5 + x^2 instead.
    const std::vector<std::pair<FieldElement, FieldElement>> other = {
        {fe(1, q), fe(6, q)}, {fe(2, q), fe(9, q)}, {fe(3, q), fe(3, q)}};
    CHECK(lagrange_interpolate(other, 3) == FieldVector(FieldConfig(q), {5, 0, 1}));
}

TEST_CASE("interpolation errors") {
    const std::vector<std::pair<FieldElement, FieldElement>> dup = {{fe(1, 7), fe(3, 7)}, {fe(1, 7), fe(4, 7)}};
    CHECK_THROWS_AS(lagrange_interpolate(dup, 2), FieldError);
    const std::vector<std::pair<FieldElement, FieldElement>> bad = {
        {fe(1, 7), fe(1, 7)}, {fe(2, 7), fe(2, 7)}, {fe(3, 7), fe(5, 7)}};
    CHECK_THROWS_AS(lagrange_interpolate(bad, 2), FieldError);
    const std::vector<std::pair<FieldElement, FieldElement>> few = {{fe(1, 7), fe(1, 7)}};
    CHECK_THROWS_AS(lagrange_interpolate(few, 2), FieldError);
}

TEST_CASE("interpolation round trip, exhaustive for q <= 7 and degree <= 2") {
    for (std::uint64_t q : {2, 3, 5, 7}) {
        const FieldConfig f(q);
        for (std::size_t len = 1; len <= 3 && len < q; ++len) {
            std::size_t total = 1;
            for (std::size_t j = 0; j < len; ++j) total *= q;
            for (std::size_t code = 0; code < total; ++code) {
                FieldVector coeffs(f, len);
                std::size_t c = code;
                for (std::size_t j = 0; j < len; ++j, c /= q) coeffs.set(j, FieldElement(c % q, f));
                std::vector<std::pair<FieldElement, FieldElement>> pts;
                for (std::uint64_t x = 1; x < q; ++x) pts.emplace_back(FieldElement(x, f), poly_eval(coeffs, FieldElement(x, f)));
                CHECK(lagrange_interpolate(pts, len) == coeffs);
            }
        }
    }
}

TEST_CASE("interpolation round trip, random up to q = 101") {
    std::mt19937_64 rng(11);
    for (std::uint64_t q : {11, 13, 101}) {
        const FieldConfig f(q);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t len = 1 + rng() % 6;
            FieldVector coeffs(f, len);
            for (std::size_t j = 0; j < len; ++j) coeffs.set(j, FieldElement(rng(), f));
            std::vector<std::pair<FieldElement, FieldElement>> pts;
            for (std::uint64_t x = 1; x <= len + 1; ++x) {
                pts.emplace_back(FieldElement(x * 3, f), poly_eval(coeffs, FieldElement(x * 3, f)));
            }
            CHECK(lagrange_interpolate(pts, len) == coeffs);
        }
    }
}

TEST_CASE("vector helpers") {
    const FieldConfig f(7);
    FieldVector v(f, {1, 2, 3, 4});
    CHECK(v.slice(1, 2) == FieldVector(f, {2, 3}));
    v.append(FieldVector(f, {6}));
    CHECK(v.size() == 5);
    FieldVector w(f, {1, 1, 1, 1, 1});
    w.add_scaled(FieldElement(2, f), v);
    CHECK(w == FieldVector(f, {3, 5, 0, 2, 6}));
    CHECK(FieldVector(f, {9}).raw()[0] == 2);
}
