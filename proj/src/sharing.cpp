#include "hierfed/sharing.hpp"

#include <string>

namespace hierfed {

SharingParams::SharingParams(std::size_t z_bs_, std::size_t nu_, std::size_t d_) : z_bs(z_bs_), nu(nu_), d(d_) {
    if (nu == 0) throw SharingError("sharing: nu must be at least 1");
    if (d == 0) throw SharingError("sharing: gradient length d must be at least 1");
}

EvaluationPointMap::EvaluationPointMap(std::map<std::size_t, FieldElement> points) : points_(std::move(points)) {
    for (auto it = points_.begin(); it != points_.end(); ++it) {
        if (it->second.is_zero()) {
            throw SharingError("evaluation point of base station " + std::to_string(it->first + 1) + " is zero");
        }
        for (auto jt = points_.begin(); jt != it; ++jt) {
            if (jt->second == it->second) {
                throw SharingError("base stations " + std::to_string(jt->first + 1) + " and " +
                                   std::to_string(it->first + 1) + " share an evaluation point");
            }
        }
    }
}

EvaluationPointMap EvaluationPointMap::sequential(std::size_t n_bs, const FieldConfig& field) {
    if (field.modulus() <= n_bs) {
        throw SharingError("field modulus q = " + std::to_string(field.modulus()) + " must exceed the number of " +
                           "base stations B = " + std::to_string(n_bs));
    }
    std::map<std::size_t, FieldElement> points;
    for (std::size_t k = 0; k < n_bs; ++k) points.emplace(k, FieldElement(k + 1, field));
    return EvaluationPointMap(std::move(points));
}

const FieldElement& EvaluationPointMap::at(std::size_t bs) const {
    auto it = points_.find(bs);
    if (it == points_.end()) throw SharingError("no evaluation point for base station " + std::to_string(bs + 1));
    return it->second;
}

EvaluationPointMap EvaluationPointMap::subset(const std::vector<std::size_t>& stations) const {
    std::map<std::size_t, FieldElement> out;
    for (std::size_t s : stations) out.emplace(s, at(s));
    return EvaluationPointMap(std::move(out));
}

std::vector<FieldVector> pad_and_split(const FieldVector& v, std::size_t nu) {
    if (nu == 0) throw SharingError("pad_and_split: nu must be at least 1");
    const std::size_t block = (v.size() + nu - 1) / nu;
    FieldVector padded = v;
    padded.append(FieldVector(v.field(), nu * block - v.size()));
    std::vector<FieldVector> blocks;
    blocks.reserve(nu);
    for (std::size_t j = 0; j < nu; ++j) blocks.push_back(padded.slice(j * block, block));
    return blocks;
}

ShareBundle make_shares(const FieldVector& g, const FieldVector& r, const SharingParams& params,
                        const EvaluationPointMap& points, RandomSource& rng, bool masked) {
    if (g.size() != params.d || r.size() != params.d) {
        throw SharingError("make_shares: expected vectors of length " + std::to_string(params.d) + ", got |g| = " +
                           std::to_string(g.size()) + ", |r| = " + std::to_string(r.size()));
    }
    if (points.size() < params.threshold()) {
        throw SharingError("make_shares: need " + std::to_string(params.threshold()) + " evaluation points, got " +
                           std::to_string(points.size()));
    }
    const FieldConfig field = g.field();
    // Coefficient blocks in degree order: data blocks first, then masks.
    std::vector<FieldVector> coeffs = pad_and_split(g + r, params.nu);
    for (std::size_t j = 0; j < params.z_bs; ++j) {
        coeffs.push_back(masked ? rng.draw_vector(field, params.block_len()) : FieldVector(field, params.block_len()));
    }

    ShareBundle bundle;
    for (const auto& [station, alpha] : points) {
        if (alpha.modulus() != field.modulus()) throw FieldError("make_shares: evaluation point modulus mismatch");
        // Horner over blocks.
        FieldVector acc(field, params.block_len());
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            FieldVector next = *it;
            next.add_scaled(alpha, acc);
            acc = std::move(next);
        }
        bundle.emplace(station, std::move(acc));
    }
    return bundle;
}

FieldVector reconstruct_padded(const std::vector<std::pair<FieldElement, FieldVector>>& evals,
                               const SharingParams& params) {
    const std::size_t need = params.threshold();
    if (evals.size() < need) {
        throw SharingError("reconstruct: need " + std::to_string(need) + " evaluations, got " +
                           std::to_string(evals.size()));
    }
    const std::size_t block = params.block_len();
    std::vector<FieldElement> xs;
    xs.reserve(evals.size());
    for (const auto& [x, y] : evals) {
        if (y.size() != block) {
            throw SharingError("reconstruct: evaluation has length " + std::to_string(y.size()) + ", expected " +
                               std::to_string(block));
        }
        xs.push_back(x);
    }
    const FieldConfig field = xs.front().field();
    const auto basis = lagrange_basis(xs, need);

    // coeff_blocks[j] = sum_k basis[k][j] * y_k
    std::vector<FieldVector> coeff_blocks(need, FieldVector(field, block));
    for (std::size_t k = 0; k < need; ++k) {
        for (std::size_t j = 0; j < need; ++j) coeff_blocks[j].add_scaled(basis[k][j], evals[k].second);
    }
    for (std::size_t k = need; k < evals.size(); ++k) {
        FieldVector expect(field, block);
        for (auto it = coeff_blocks.rbegin(); it != coeff_blocks.rend(); ++it) {
            FieldVector next = *it;
            next.add_scaled(evals[k].first, expect);
            expect = std::move(next);
        }
        if (expect != evals[k].second) {
            throw SharingError("reconstruct: evaluation at x = " + std::to_string(evals[k].first.value()) +
                               " is inconsistent with the others");
        }
    }

    FieldVector out(field, 0);
    for (std::size_t j = 0; j < params.nu; ++j) out.append(coeff_blocks[j]);
    return out.slice(0, params.d);
}

}  // namespace hierfed
