#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "hierfed/field.hpp"
#include "hierfed/random.hpp"

namespace hierfed {

class SharingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ramp-sharing shape for one client: nu data blocks, z_bs mask blocks.
struct SharingParams {
    std::size_t z_bs = 0;
    std::size_t nu = 1;
    std::size_t d = 1;

    SharingParams(std::size_t z_bs, std::size_t nu, std::size_t d);

    /// Length of each block, ceil(d / nu).
    std::size_t block_len() const { return (d + nu - 1) / nu; }
    std::size_t padded_len() const { return nu * block_len(); }
    std::size_t threshold() const { return z_bs + nu; }
};

/// Base-station index -> evaluation point alpha_k. Points are pairwise
/// distinct and nonzero.
class EvaluationPointMap {
public:
    EvaluationPointMap() = default;
    explicit EvaluationPointMap(std::map<std::size_t, FieldElement> points);

    /// alpha_k = k + 1 for base stations 0..n_bs-1. Requires q > n_bs.
    static EvaluationPointMap sequential(std::size_t n_bs, const FieldConfig& field);

    const FieldElement& at(std::size_t bs) const;
    bool contains(std::size_t bs) const { return points_.contains(bs); }
    std::size_t size() const { return points_.size(); }
    auto begin() const { return points_.begin(); }
    auto end() const { return points_.end(); }

    /// Restriction to the given base stations.
    EvaluationPointMap subset(const std::vector<std::size_t>& stations) const;

private:
    std::map<std::size_t, FieldElement> points_;
};

/// f(alpha_k) for every base station the client talks to, keyed by station.
using ShareBundle = std::map<std::size_t, FieldVector>;

/// Zero-pads v to nu * ceil(d/nu) and cuts it into nu contiguous blocks.
std::vector<FieldVector> pad_and_split(const FieldVector& v, std::size_t nu);

/// Encodes g + r as f(x) = sum_{j<nu} x^j (g^j + r^j) + sum_{j<z} x^{nu+j} t^j
/// and evaluates it at each point. The masks t^j are drawn from `rng` in
/// order j = 0..z-1; with `masked == false` they are fixed to zero instead
/// (and nothing is drawn).
ShareBundle make_shares(const FieldVector& g, const FieldVector& r, const SharingParams& params,
                        const EvaluationPointMap& points, RandomSource& rng, bool masked = true);

/// Interpolates the coefficient blocks from >= z + nu evaluations,
/// concatenates the nu data blocks and truncates to length d.
FieldVector reconstruct_padded(const std::vector<std::pair<FieldElement, FieldVector>>& evals,
                               const SharingParams& params);

}  // namespace hierfed
