#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hierfed/field.hpp"
#include "hierfed/random.hpp"
#include "hierfed/sharing.hpp"
#include "hierfed/topology.hpp"

namespace hierfed {

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ActorKind { Client, BaseStation, Federator };

struct ActorId {
    ActorKind kind = ActorKind::Federator;
    std::size_t index = 0;

    static ActorId client(std::size_t i) { return {ActorKind::Client, i}; }
    static ActorId station(std::size_t k) { return {ActorKind::BaseStation, k}; }
    static ActorId federator() { return {ActorKind::Federator, 0}; }

    /// "ue3", "bs2", "fed" (1-based indices)
    std::string to_string() const;
    friend bool operator==(const ActorId&, const ActorId&) = default;
};

enum class MessageKind { Share, KeyVector, PatternAggregate, KeyChainPartial, KeyAggregate };
enum class LinkClass { UeToBs, BsToBs, BsToFederator };

std::string to_string(MessageKind kind);

struct Message {
    ActorId src;
    ActorId dst;
    MessageKind kind;
    FieldVector payload;
    /// Which connectivity pattern a PatternAggregate belongs to. Metadata:
    /// not counted as transmitted symbols.
    std::optional<StationSet> pattern_tag;

    LinkClass link() const;
};

/// Public round parameters the federator needs to decode.
struct RoundHeader {
    std::uint64_t modulus = 0;
    std::size_t d = 0;
    std::size_t z_bs = 0;
    std::size_t n_bs = 0;
    std::vector<std::uint64_t> alpha;  ///< alpha[k] for base station k

    friend bool operator==(const RoundHeader&, const RoundHeader&) = default;
};

/// Every transmitted message of one round, in send order, plus symbol
/// tallies per link class.
class MessageLog {
public:
    explicit MessageLog(RoundHeader header) : header_(std::move(header)) {}

    void record(Message message);
    void reserve(std::size_t messages) { messages_.reserve(messages); }

    const RoundHeader& header() const { return header_; }
    const std::vector<Message>& messages() const { return messages_; }
    std::uint64_t symbols(LinkClass link) const { return tallies_[static_cast<std::size_t>(link)]; }

    /// Recomputes the tallies from the messages and compares.
    bool tallies_consistent() const;

    /// One line per message: `src dst kind length pattern_tag`.
    std::string export_text() const;

    friend bool operator==(const MessageLog&, const MessageLog&);

private:
    RoundHeader header_;
    std::vector<Message> messages_;
    std::uint64_t tallies_[3] = {0, 0, 0};
};

bool operator==(const Message& a, const Message& b);

struct PatternSum {
    StationSet pattern;
    FieldVector sum;  ///< sum over pattern members of (g_i + r_i), length d
};

struct RoundResult {
    FieldVector aggregate;  ///< sum_i g_i
    std::vector<PatternSum> padded_sums;
    FieldVector key_sum;  ///< sum_i r_i
    MessageLog log;
};

/// A client's private state for one round.
struct ClientLocal {
    FieldVector gradient;
    FieldVector key;
    std::vector<FieldVector> masks;  ///< t^1..t^z, empty when unmasked
};

struct RoundTrace {
    RoundResult result;
    std::vector<ClientLocal> locals;
};

enum class SchemeVariant {
    Honest,
    NoMasks,  ///< negative control: t^j = 0
};

/// One aggregation round driven by an arbitrary randomness source. Draw
/// order: for each client in index order, r_i (d symbols) then its masks.
RoundTrace execute_round(const Topology& t, std::span<const FieldVector> gradients, const FieldConfig& field,
                         RandomSource& rng, SchemeVariant variant = SchemeVariant::Honest);

/// Number of random symbols execute_round consumes for this configuration.
std::size_t randomness_dimension(const Topology& t, std::size_t d, SchemeVariant variant = SchemeVariant::Honest);

RoundResult run_round(const Topology& t, std::span<const FieldVector> gradients, const FieldConfig& field,
                      std::uint64_t seed);

RoundResult run_round_broken_no_masks(const Topology& t, std::span<const FieldVector> gradients,
                                      const FieldConfig& field, std::uint64_t seed);

/// Federator-side decoding using only the logged messages addressed to the
/// federator.
RoundResult replay(const MessageLog& log);

}  // namespace hierfed
