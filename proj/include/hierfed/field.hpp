#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hierfed {

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Prime modulus of F_q. Construction fails unless q is prime.
class FieldConfig {
public:
    static constexpr std::uint64_t kMersenne31 = (1ULL << 31) - 1;
    static constexpr std::uint64_t kMersenne61 = (1ULL << 61) - 1;

    explicit FieldConfig(std::uint64_t q = kMersenne31);

    std::uint64_t modulus() const { return q_; }

    friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

private:
    struct Trusted {};
    FieldConfig(std::uint64_t q, Trusted) : q_(q) {}
    friend class FieldElement;
    friend class FieldVector;

    std::uint64_t q_;
};

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);

namespace detail {

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    std::uint64_t s = a + b;  // q < 2^63 so no overflow
    return s >= q ? s - q : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return a >= b ? a - b : a + q - b;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);

}  // namespace detail

class FieldElement {
public:
    FieldElement(std::uint64_t value, const FieldConfig& field)
        : value_(value % field.modulus()), q_(field.modulus()) {}

    static FieldElement from_signed(std::int64_t value, const FieldConfig& field);

    std::uint64_t value() const { return value_; }
    std::uint64_t modulus() const { return q_; }
    FieldConfig field() const { return FieldConfig(q_, FieldConfig::Trusted{}); }
    bool is_zero() const { return value_ == 0; }

    friend bool operator==(const FieldElement&, const FieldElement&) = default;

private:
    // Skips the primality check; only reachable from an already-validated modulus.
    FieldElement(std::uint64_t value, std::uint64_t q) : value_(value), q_(q) {}

    friend FieldElement ff_add(const FieldElement&, const FieldElement&);
    friend FieldElement ff_sub(const FieldElement&, const FieldElement&);
    friend FieldElement ff_mul(const FieldElement&, const FieldElement&);
    friend FieldElement ff_neg(const FieldElement&);
    friend FieldElement ff_inv(const FieldElement&);
    friend class FieldVector;

    std::uint64_t value_;
    std::uint64_t q_;
};

FieldElement ff_add(const FieldElement& a, const FieldElement& b);
FieldElement ff_sub(const FieldElement& a, const FieldElement& b);
FieldElement ff_mul(const FieldElement& a, const FieldElement& b);
FieldElement ff_neg(const FieldElement& a);
FieldElement ff_inv(const FieldElement& a);

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) { return ff_add(a, b); }
inline FieldElement operator-(const FieldElement& a, const FieldElement& b) { return ff_sub(a, b); }
inline FieldElement operator*(const FieldElement& a, const FieldElement& b) { return ff_mul(a, b); }

/// Vector over F_q. Elements are stored as residues against a single modulus,
/// so every element shares one FieldConfig by construction.
class FieldVector {
public:
    explicit FieldVector(const FieldConfig& field, std::size_t length = 0)
        : q_(field.modulus()), values_(length, 0) {}
    FieldVector(const FieldConfig& field, std::initializer_list<std::uint64_t> values);
    FieldVector(const FieldConfig& field, std::vector<std::uint64_t> values);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    std::uint64_t modulus() const { return q_; }
    FieldConfig field() const { return FieldConfig(q_, FieldConfig::Trusted{}); }

    FieldElement at(std::size_t i) const { return FieldElement(values_.at(i), q_); }
    FieldElement operator[](std::size_t i) const { return FieldElement(values_[i], q_); }
    void set(std::size_t i, const FieldElement& e);
    void push_back(const FieldElement& e);

    std::span<const std::uint64_t> raw() const { return values_; }

    FieldVector& operator+=(const FieldVector& other);
    FieldVector& operator-=(const FieldVector& other);
    /// this += scalar * other
    void add_scaled(const FieldElement& scalar, const FieldVector& other);

    friend FieldVector operator+(FieldVector a, const FieldVector& b) { return a += b; }
    friend FieldVector operator-(FieldVector a, const FieldVector& b) { return a -= b; }
    friend bool operator==(const FieldVector&, const FieldVector&) = default;

    /// Contiguous slice [offset, offset + length).
    FieldVector slice(std::size_t offset, std::size_t length) const;
    void append(const FieldVector& other);

    std::string to_string() const;

private:
    void check_same(const FieldVector& other, const char* op) const;

    std::uint64_t q_;
    std::vector<std::uint64_t> values_;
};

/// Horner evaluation of sum_j coeffs[j] * x^j.
FieldElement poly_eval(const FieldVector& coeffs, const FieldElement& x);

/// Coefficients (degree < degree_bound) of the unique polynomial through
/// `points`. Extra points beyond degree_bound are checked for consistency.
FieldVector lagrange_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points,
                                 std::size_t degree_bound);

/// Rows of the inverse Vandermonde matrix for the first `degree_bound`
/// nodes: basis[k] holds the coefficients of the k-th Lagrange polynomial.
std::vector<FieldVector> lagrange_basis(std::span<const FieldElement> xs, std::size_t degree_bound);

}  // namespace hierfed
