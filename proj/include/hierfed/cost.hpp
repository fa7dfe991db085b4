#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hierfed/protocol.hpp"
#include "hierfed/topology.hpp"

namespace hierfed {

using Rational = boost::multiprecision::cpp_rational;

class CostError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Renders a rational as a decimal with at most `significant` significant
/// digits, rounded half-up, trailing zeros removed.
std::string to_decimal(const Rational& value, int significant = 15);

double to_double(const Rational& value);

/// Measured symbol counts next to the closed-form predictions and bounds.
struct CostReport {
    std::uint64_t c_ue = 0;
    std::uint64_t c_bs = 0;
    std::uint64_t c_bsf = 0;
    std::uint64_t c_total = 0;

    // Filled only when a topology is supplied.
    std::uint64_t predicted_c_ue = 0;
    std::uint64_t predicted_c_bs = 0;
    std::uint64_t predicted_c_bsf = 0;
    Rational c_min = 0;
    Rational loose_lower = 0;
    Rational loose_upper = 0;
    Rational beta = 0;
    Rational tight_value = 0;
    Rational ratio_bound = 0;

    bool matches_prediction() const {
        return c_ue == predicted_c_ue && c_bs == predicted_c_bs && c_bsf == predicted_c_bsf;
    }
};

/// Client-to-base-station symbols: each client's z + nu_i shares of
/// ceil(d / nu_i) symbols plus its d-symbol key.
std::uint64_t predict_c_ue(const Topology& t, std::size_t d);

/// Key chain between base stations: d (B - 1).
std::uint64_t predict_c_bs(const Topology& t, std::size_t d);

/// Base stations to federator: the key aggregate plus, for every occupied
/// pattern P, |P| aggregates of ceil(d / nu_P) symbols.
std::uint64_t predict_c_bsf(const Topology& t, std::size_t d);

/// d (max_i (z + nu_i)/nu_i + sum_i (z + nu_i)/nu_i)
Rational predict_c_min(const Topology& t, std::size_t d);

/// Alternative lower-bound curve for uniform connectivity: d N ((z+nu)/nu + B/N).
Rational predict_c_min_curve(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t nu,
                              std::size_t d);

struct LooseBounds {
    Rational lower;
    Rational upper;
};

/// lower = d (N + B + (N+1) B / (B - z)), upper = d (N + B + 2N (z + 1))
LooseBounds predict_loose_bounds(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t d);

/// 3 + (B - z) / (N + 1)
Rational ratio_bound(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs);

/// beta = (c_total - dN - dB) / sum_i (z + nu_i) ceil(d / nu_i). The
/// denominator equals d sum_i (z + nu_i)/nu_i whenever nu_i | d. Throws if
/// beta leaves [(N+1)/N, 2].
Rational compute_beta(const Topology& t, const CostReport& measured, std::size_t d);

/// Counts only.
CostReport measure(const MessageLog& log);

/// Counts plus predictions, c_min, loose bounds, beta and the ratio bound.
CostReport measure(const MessageLog& log, const Topology& t);

struct SweepRow {
    std::size_t nu;
    Rational c_min_norm;      ///< lower bound from the closed form, / (N d)
    Rational c_min_curve_norm;  ///< the alternative lower-bound curve, / (N d)
    Rational tight_lower_norm;
    Rational upper_norm;
};

/// Uniform-connectivity cost curves normalised by N d for nu in
/// [nu_lo, nu_hi].
std::vector<SweepRow> sweep_costs(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t d,
                                 std::size_t nu_lo, std::size_t nu_hi);

/// `nu,c_min_norm,tight_lower_norm,upper_norm` CSV.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace hierfed
