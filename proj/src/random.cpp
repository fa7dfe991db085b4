#include "hierfed/random.hpp"

#include <limits>

namespace hierfed {

FieldVector RandomSource::draw_vector(const FieldConfig& field, std::size_t length) {
    std::vector<std::uint64_t> values(length);
    for (auto& v : values) v = draw(field.modulus());
    return FieldVector(field, std::move(values));
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: empty range");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    // Largest multiple of bound that fits; reject the tail to stay unbiased.
    const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
    std::uint64_t x;
    do {
        x = engine();
    } while (x > limit);
    return x % bound;
}

std::uint64_t SeededSource::draw(std::uint64_t modulus) { return uniform_below(engine_, modulus); }

std::uint64_t ScriptedSource::draw(std::uint64_t modulus) {
    if (next_ >= script_.size()) throw std::out_of_range("ScriptedSource: script exhausted");
    return script_[next_++] % modulus;
}

}  // namespace hierfed
