#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hierfed/field.hpp"

namespace hierfed {

/// Source of uniform field symbols. Protocol code never touches an engine
/// directly, so the same round can be driven by a seed or by an exhaustive
/// enumeration of every possible draw.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    /// Uniform value in [0, modulus).
    virtual std::uint64_t draw(std::uint64_t modulus) = 0;

    FieldVector draw_vector(const FieldConfig& field, std::size_t length);
};

/// mt19937_64 with rejection sampling, so the stream is identical across
/// standard library implementations.
class SeededSource final : public RandomSource {
public:
    explicit SeededSource(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t draw(std::uint64_t modulus) override;
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Replays a fixed list of symbols in order; throws once exhausted.
class ScriptedSource final : public RandomSource {
public:
    explicit ScriptedSource(std::span<const std::uint64_t> script) : script_(script) {}
    std::uint64_t draw(std::uint64_t modulus) override;
    std::size_t consumed() const { return next_; }

private:
    std::span<const std::uint64_t> script_;
    std::size_t next_ = 0;
};

/// Always returns zero and counts how many symbols were requested.
class CountingSource final : public RandomSource {
public:
    std::uint64_t draw(std::uint64_t) override {
        ++count_;
        return 0;
    }
    std::size_t count() const { return count_; }

private:
    std::size_t count_ = 0;
};

/// Uniform integer in [0, bound) from a raw 64-bit engine, bit-portable.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

}  // namespace hierfed
