#include "hierfed/field.hpp"

#include <array>
#include <sstream>

namespace hierfed {

namespace detail {

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
    std::uint64_t result = 1 % q;
    base %= q;
    while (exp != 0) {
        if (exp & 1) result = mul_mod(result, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return result;
}

}  // namespace detail

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses are sufficient for every n < 2^64.
    for (std::uint64_t a : {2, 325, 9375, 28178, 450775, 9780504, 1795265022}) {
        std::uint64_t x = detail::pow_mod(a, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = detail::mul_mod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldConfig::FieldConfig(std::uint64_t q) : q_(q) {
    if (q >= (1ULL << 63)) throw FieldError("field modulus must be below 2^63, got " + std::to_string(q));
    if (!is_prime(q)) throw FieldError("field modulus q = " + std::to_string(q) + " is not prime");
}

static void require_same(std::uint64_t qa, std::uint64_t qb, const char* op) {
    if (qa != qb) {
        throw FieldError(std::string(op) + ": modulus mismatch (" + std::to_string(qa) + " vs " +
                         std::to_string(qb) + ")");
    }
}

FieldElement FieldElement::from_signed(std::int64_t value, const FieldConfig& field) {
    const std::uint64_t q = field.modulus();
    if (value >= 0) return FieldElement(static_cast<std::uint64_t>(value), field);
    // -(value) may overflow for INT64_MIN; go through unsigned arithmetic.
    std::uint64_t magnitude = static_cast<std::uint64_t>(-(value + 1)) + 1;
    return FieldElement(detail::sub_mod(0, magnitude % q, q), q);
}

FieldElement ff_add(const FieldElement& a, const FieldElement& b) {
    require_same(a.q_, b.q_, "ff_add");
    return FieldElement(detail::add_mod(a.value_, b.value_, a.q_), a.q_);
}

FieldElement ff_sub(const FieldElement& a, const FieldElement& b) {
    require_same(a.q_, b.q_, "ff_sub");
    return FieldElement(detail::sub_mod(a.value_, b.value_, a.q_), a.q_);
}

FieldElement ff_mul(const FieldElement& a, const FieldElement& b) {
    require_same(a.q_, b.q_, "ff_mul");
    return FieldElement(detail::mul_mod(a.value_, b.value_, a.q_), a.q_);
}

FieldElement ff_neg(const FieldElement& a) {
    return FieldElement(detail::sub_mod(0, a.value_, a.q_), a.q_);
}

FieldElement ff_inv(const FieldElement& a) {
    if (a.value_ == 0) throw FieldError("ff_inv: zero has no inverse");
    // Fermat: a^(q-2) = a^-1 for prime q.
    return FieldElement(detail::pow_mod(a.value_, a.q_ - 2, a.q_), a.q_);
}

FieldVector::FieldVector(const FieldConfig& field, std::initializer_list<std::uint64_t> values)
    : FieldVector(field, std::vector<std::uint64_t>(values)) {}

FieldVector::FieldVector(const FieldConfig& field, std::vector<std::uint64_t> values)
    : q_(field.modulus()), values_(std::move(values)) {
    for (auto& v : values_) v %= q_;
}

void FieldVector::set(std::size_t i, const FieldElement& e) {
    require_same(q_, e.q_, "FieldVector::set");
    values_.at(i) = e.value_;
}

void FieldVector::push_back(const FieldElement& e) {
    require_same(q_, e.q_, "FieldVector::push_back");
    values_.push_back(e.value_);
}

void FieldVector::check_same(const FieldVector& other, const char* op) const {
    require_same(q_, other.q_, op);
    if (values_.size() != other.values_.size()) {
        throw FieldError(std::string(op) + ": length mismatch (" + std::to_string(values_.size()) +
                         " vs " + std::to_string(other.values_.size()) + ")");
    }
}

FieldVector& FieldVector::operator+=(const FieldVector& other) {
    check_same(other, "vector add");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] = detail::add_mod(values_[i], other.values_[i], q_);
    }
    return *this;
}

FieldVector& FieldVector::operator-=(const FieldVector& other) {
    check_same(other, "vector sub");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] = detail::sub_mod(values_[i], other.values_[i], q_);
    }
    return *this;
}

void FieldVector::add_scaled(const FieldElement& scalar, const FieldVector& other) {
    check_same(other, "add_scaled");
    require_same(q_, scalar.q_, "add_scaled");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] = detail::add_mod(values_[i], detail::mul_mod(scalar.value_, other.values_[i], q_), q_);
    }
}

FieldVector FieldVector::slice(std::size_t offset, std::size_t length) const {
    if (offset + length > values_.size()) throw FieldError("FieldVector::slice out of range");
    FieldVector out(field(), 0);
    out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                       values_.begin() + static_cast<std::ptrdiff_t>(offset + length));
    return out;
}

void FieldVector::append(const FieldVector& other) {
    require_same(q_, other.q_, "FieldVector::append");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
}

std::string FieldVector::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i) os << ',';
        os << values_[i];
    }
    os << ']';
    return os.str();
}

FieldElement poly_eval(const FieldVector& coeffs, const FieldElement& x) {
    if (coeffs.empty()) throw FieldError("poly_eval: empty coefficient vector");
    require_same(coeffs.modulus(), x.modulus(), "poly_eval");
    const std::uint64_t q = coeffs.modulus();
    auto raw = coeffs.raw();
    std::uint64_t acc = 0;
    for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
        acc = detail::add_mod(detail::mul_mod(acc, x.value(), q), *it, q);
    }
    return FieldElement(acc, coeffs.field());
}

std::vector<FieldVector> lagrange_basis(std::span<const FieldElement> xs, std::size_t degree_bound) {
    if (degree_bound == 0) throw FieldError("lagrange_basis: degree bound must be positive");
    if (xs.size() < degree_bound) {
        throw FieldError("lagrange_basis: need " + std::to_string(degree_bound) + " points, got " +
                         std::to_string(xs.size()));
    }
    const FieldConfig field = xs[0].field();
    const std::size_t n = degree_bound;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        require_same(xs[i].modulus(), field.modulus(), "lagrange_basis");
        for (std::size_t j = 0; j < i; ++j) {
            if (xs[i] == xs[j]) {
                throw FieldError("lagrange_basis: duplicate x-coordinate " + std::to_string(xs[i].value()));
            }
        }
    }

    // Master polynomial M(x) = prod_k (x - x_k), degree n.
    FieldVector master(field, n + 1);
    master.set(0, FieldElement(1, field));
    for (std::size_t k = 0; k < n; ++k) {
        FieldVector next(field, n + 1);
        for (std::size_t j = 0; j <= k; ++j) {
            // next += master[j] * x^(j+1) - x_k * master[j] * x^j
            next.set(j + 1, next[j + 1] + master[j]);
            next.set(j, next[j] - xs[k] * master[j]);
        }
        master = std::move(next);
    }

    std::vector<FieldVector> basis;
    basis.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        // Synthetic division M(x) / (x - x_k).
        FieldVector quotient(field, n);
        FieldElement carry = master[n];
        for (std::size_t j = n; j-- > 0;) {
            quotient.set(j, carry);
            carry = master[j] + xs[k] * carry;
        }
        FieldElement denom(1, field);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != k) denom = denom * (xs[k] - xs[j]);
        }
        FieldVector scaled(field, n);
        scaled.add_scaled(ff_inv(denom), quotient);
        basis.push_back(std::move(scaled));
    }
    return basis;
}

FieldVector lagrange_interpolate(std::span<const std::pair<FieldElement, FieldElement>> points,
                                 std::size_t degree_bound) {
    if (points.empty()) throw FieldError("lagrange_interpolate: no points");
    std::vector<FieldElement> xs;
    xs.reserve(points.size());
    for (const auto& [x, y] : points) {
        require_same(x.modulus(), y.modulus(), "lagrange_interpolate");
        xs.push_back(x);
    }
    const auto basis = lagrange_basis(xs, degree_bound);
    FieldVector coeffs(xs[0].field(), degree_bound);
    for (std::size_t k = 0; k < degree_bound; ++k) coeffs.add_scaled(points[k].second, basis[k]);
    for (std::size_t k = degree_bound; k < points.size(); ++k) {
        if (poly_eval(coeffs, points[k].first) != points[k].second) {
            throw FieldError("lagrange_interpolate: point (" + std::to_string(points[k].first.value()) + ", " +
                             std::to_string(points[k].second.value()) +
                             ") is inconsistent with the interpolated polynomial");
        }
    }
    return coeffs;
}

}  // namespace hierfed
