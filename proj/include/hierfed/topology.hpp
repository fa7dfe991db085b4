#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hierfed {

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PrivacyParams {
    std::size_t z_ue = 0;  ///< max colluding clients
    std::size_t z_bs = 0;  ///< max colluding base stations

    friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

/// Sorted set of base-station indices (0-based).
using StationSet = std::vector<std::size_t>;

struct ConnectivityPattern {
    StationSet pattern;
    std::vector<std::size_t> members;  ///< client indices, ascending
};

/// Clients, base stations and who can reach whom. Immutable once built.
/// Indices are 0-based; text formats render them 1-based.
class Topology {
public:
    std::size_t n_clients() const { return gamma_.size(); }
    std::size_t n_bs() const { return n_bs_; }
    const PrivacyParams& privacy() const { return privacy_; }
    std::size_t z_bs() const { return privacy_.z_bs; }

    const StationSet& gamma(std::size_t client) const { return gamma_.at(client); }
    std::size_t main_bs(std::size_t client) const { return main_bs_.at(client); }
    /// nu_i = |Gamma_i| - z_bs
    std::size_t nu(std::size_t client) const { return gamma_.at(client).size() - privacy_.z_bs; }

    /// U_m: clients whose main base station is m.
    std::vector<std::size_t> cluster(std::size_t bs) const;

    /// Plain-text form: `gamma = 1,2; 1,2; 2,3` and `main_bs = 1,1,2`.
    std::string gamma_string() const;
    std::string main_bs_string() const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    friend Topology build_topology(std::size_t, std::size_t, std::vector<StationSet>, std::vector<std::size_t>,
                                   PrivacyParams);
    Topology() = default;

    std::size_t n_bs_ = 0;
    std::vector<StationSet> gamma_;
    std::vector<std::size_t> main_bs_;
    PrivacyParams privacy_;
};

/// Validates and freezes a topology. Gamma sets may arrive unsorted and are
/// normalised; duplicates are rejected.
Topology build_topology(std::size_t n_clients, std::size_t n_bs, std::vector<StationSet> gamma,
                        std::vector<std::size_t> main_bs, PrivacyParams privacy);

/// Partition of clients by exact equality of Gamma_i, ordered
/// lexicographically by pattern.
std::vector<ConnectivityPattern> group_by_pattern(const Topology& t);

/// Every client gets a uniform (z_bs + nu)-subset of the base stations and a
/// uniform main base station inside it.
Topology random_topology(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t nu,
                         std::uint64_t seed, std::size_t z_ue = 0);

/// Like random_topology but nu_i is drawn per client from [1, n_bs - z_bs].
Topology random_mixed_topology(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::uint64_t seed,
                               std::size_t z_ue = 0);

std::string format_station_set(const StationSet& s);

}  // namespace hierfed
