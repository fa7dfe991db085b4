#include "hierfed/topology.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "hierfed/random.hpp"

namespace hierfed {

std::string format_station_set(const StationSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i] + 1);
    }
    return out + "}";
}

Topology build_topology(std::size_t n_clients, std::size_t n_bs, std::vector<StationSet> gamma,
                        std::vector<std::size_t> main_bs, PrivacyParams privacy) {
    if (n_clients == 0) throw TopologyError("topology needs at least one client");
    if (n_bs == 0) throw TopologyError("topology needs at least one base station");
    if (privacy.z_bs >= n_bs) {
        throw TopologyError("z_bs = " + std::to_string(privacy.z_bs) + " must be below the number of base stations B = " +
                            std::to_string(n_bs));
    }
    if (gamma.size() != n_clients || main_bs.size() != n_clients) {
        throw TopologyError("expected connectivity and main base station for " + std::to_string(n_clients) +
                            " clients, got " + std::to_string(gamma.size()) + " and " + std::to_string(main_bs.size()));
    }
    for (std::size_t i = 0; i < n_clients; ++i) {
        auto& g = gamma[i];
        std::sort(g.begin(), g.end());
        if (std::adjacent_find(g.begin(), g.end()) != g.end()) {
            throw TopologyError("client " + std::to_string(i + 1) + " lists a base station twice");
        }
        if (!g.empty() && g.back() >= n_bs) {
            throw TopologyError("client " + std::to_string(i + 1) + " references base station " +
                                std::to_string(g.back() + 1) + " but B = " + std::to_string(n_bs));
        }
        if (g.size() <= privacy.z_bs) {
            throw TopologyError("client " + std::to_string(i + 1) + " is under-connected: |Gamma| = " +
                                std::to_string(g.size()) + " but needs at least z_bs + 1 = " +
                                std::to_string(privacy.z_bs + 1));
        }
        if (!std::binary_search(g.begin(), g.end(), main_bs[i])) {
            throw TopologyError("main base station " + std::to_string(main_bs[i] + 1) + " of client " +
                                std::to_string(i + 1) + " is not in its connectivity set " + format_station_set(g));
        }
    }
    Topology t;
    t.n_bs_ = n_bs;
    t.gamma_ = std::move(gamma);
    t.main_bs_ = std::move(main_bs);
    t.privacy_ = privacy;
    return t;
}

std::vector<std::size_t> Topology::cluster(std::size_t bs) const {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < main_bs_.size(); ++i) {
        if (main_bs_[i] == bs) members.push_back(i);
    }
    return members;
}

std::string Topology::gamma_string() const {
    std::string out;
    for (std::size_t i = 0; i < gamma_.size(); ++i) {
        if (i) out += "; ";
        for (std::size_t j = 0; j < gamma_[i].size(); ++j) {
            if (j) out += ',';
            out += std::to_string(gamma_[i][j] + 1);
        }
    }
    return out;
}

std::string Topology::main_bs_string() const {
    std::string out;
    for (std::size_t i = 0; i < main_bs_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(main_bs_[i] + 1);
    }
    return out;
}

std::vector<ConnectivityPattern> group_by_pattern(const Topology& t) {
    std::map<StationSet, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < t.n_clients(); ++i) groups[t.gamma(i)].push_back(i);
    std::vector<ConnectivityPattern> out;
    out.reserve(groups.size());
    for (auto& [pattern, members] : groups) out.push_back({pattern, std::move(members)});
    return out;
}

namespace {

StationSet random_subset(std::mt19937_64& engine, std::size_t n, std::size_t k) {
    // Partial Fisher-Yates; engine draws go through uniform_below for portability.
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + uniform_below(engine, n - i);
        std::swap(all[i], all[j]);
    }
    StationSet out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

Topology random_topology(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t nu,
                         std::uint64_t seed, std::size_t z_ue) {
    if (nu == 0 || z_bs + nu > n_bs) {
        throw TopologyError("infeasible connectivity: z_bs + nu = " + std::to_string(z_bs + nu) + " with B = " +
                            std::to_string(n_bs) + " (nu must be in [1, B - z_bs])");
    }
    std::mt19937_64 engine(seed);
    std::vector<StationSet> gamma;
    std::vector<std::size_t> main_bs;
    for (std::size_t i = 0; i < n_clients; ++i) {
        gamma.push_back(random_subset(engine, n_bs, z_bs + nu));
        main_bs.push_back(gamma.back()[uniform_below(engine, gamma.back().size())]);
    }
    return build_topology(n_clients, n_bs, std::move(gamma), std::move(main_bs), {z_ue, z_bs});
}

Topology random_mixed_topology(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::uint64_t seed,
                               std::size_t z_ue) {
    if (z_bs >= n_bs) {
        throw TopologyError("infeasible connectivity: z_bs = " + std::to_string(z_bs) + " with B = " +
                            std::to_string(n_bs));
    }
    std::mt19937_64 engine(seed);
    std::vector<StationSet> gamma;
    std::vector<std::size_t> main_bs;
    for (std::size_t i = 0; i < n_clients; ++i) {
        const std::size_t nu = 1 + uniform_below(engine, n_bs - z_bs);
        gamma.push_back(random_subset(engine, n_bs, z_bs + nu));
        main_bs.push_back(gamma.back()[uniform_below(engine, gamma.back().size())]);
    }
    return build_topology(n_clients, n_bs, std::move(gamma), std::move(main_bs), {z_ue, z_bs});
}

}  // namespace hierfed
