#include "hierfed/protocol.hpp"

#include <map>
#include <sstream>

namespace hierfed {

std::string ActorId::to_string() const {
    switch (kind) {
        case ActorKind::Client: return "ue" + std::to_string(index + 1);
        case ActorKind::BaseStation: return "bs" + std::to_string(index + 1);
        case ActorKind::Federator: return "fed";
    }
    return "?";
}

std::string to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::Share: return "Share";
        case MessageKind::KeyVector: return "KeyVector";
        case MessageKind::PatternAggregate: return "PatternAggregate";
        case MessageKind::KeyChainPartial: return "KeyChainPartial";
        case MessageKind::KeyAggregate: return "KeyAggregate";
    }
    return "?";
}

LinkClass Message::link() const {
    if (src.kind == ActorKind::Client && dst.kind == ActorKind::BaseStation) return LinkClass::UeToBs;
    if (src.kind == ActorKind::BaseStation && dst.kind == ActorKind::BaseStation) return LinkClass::BsToBs;
    if (src.kind == ActorKind::BaseStation && dst.kind == ActorKind::Federator) return LinkClass::BsToFederator;
    throw ProtocolError("no link class from " + src.to_string() + " to " + dst.to_string());
}

bool operator==(const Message& a, const Message& b) {
    return a.src == b.src && a.dst == b.dst && a.kind == b.kind && a.payload == b.payload &&
           a.pattern_tag == b.pattern_tag;
}

bool operator==(const MessageLog& a, const MessageLog& b) {
    return a.header_ == b.header_ && a.messages_ == b.messages_;
}

void MessageLog::record(Message message) {
    const std::size_t len = message.payload.size();
    if (len == 0) throw ProtocolError("empty payload in " + to_string(message.kind) + " message");
    if (message.payload.modulus() != header_.modulus) throw ProtocolError("payload modulus differs from round field");
    switch (message.kind) {
        case MessageKind::KeyVector:
        case MessageKind::KeyChainPartial:
        case MessageKind::KeyAggregate:
            if (len != header_.d) {
                throw ProtocolError(to_string(message.kind) + " carries " + std::to_string(len) +
                                    " symbols, expected d = " + std::to_string(header_.d));
            }
            break;
        case MessageKind::PatternAggregate: {
            if (!message.pattern_tag || message.pattern_tag->size() <= header_.z_bs) {
                throw ProtocolError("PatternAggregate without a usable pattern tag");
            }
            const SharingParams params(header_.z_bs, message.pattern_tag->size() - header_.z_bs, header_.d);
            if (len != params.block_len()) {
                throw ProtocolError("PatternAggregate carries " + std::to_string(len) + " symbols, expected " +
                                    std::to_string(params.block_len()));
            }
            break;
        }
        case MessageKind::Share:
            if (len > header_.d) throw ProtocolError("Share longer than the gradient");
            break;
    }
    tallies_[static_cast<std::size_t>(message.link())] += len;
    messages_.push_back(std::move(message));
}

bool MessageLog::tallies_consistent() const {
    std::uint64_t recount[3] = {0, 0, 0};
    for (const auto& m : messages_) recount[static_cast<std::size_t>(m.link())] += m.payload.size();
    return recount[0] == tallies_[0] && recount[1] == tallies_[1] && recount[2] == tallies_[2];
}

std::string MessageLog::export_text() const {
    std::ostringstream os;
    for (const auto& m : messages_) {
        os << m.src.to_string() << ' ' << m.dst.to_string() << ' ' << to_string(m.kind) << ' ' << m.payload.size()
           << ' ';
        if (m.pattern_tag) {
            os << format_station_set(*m.pattern_tag);
        } else {
            os << '-';
        }
        os << '\n';
    }
    return os.str();
}

namespace {

/// Records each send in the log and drops it in the receiver's inbox.
class Network {
public:
    Network(MessageLog& log, std::size_t n_bs) : log_(log), station_inbox_(n_bs) {}

    void send(Message m) {
        log_.record(m);
        if (m.dst.kind == ActorKind::BaseStation) {
            station_inbox_.at(m.dst.index).push_back(std::move(m));
        } else if (m.dst.kind == ActorKind::Federator) {
            federator_inbox_.push_back(std::move(m));
        } else {
            throw ProtocolError("clients receive nothing in this protocol");
        }
    }

    std::vector<Message> take_inbox(std::size_t station) { return std::exchange(station_inbox_.at(station), {}); }
    const std::vector<Message>& federator_inbox() const { return federator_inbox_; }

private:
    MessageLog& log_;
    std::vector<std::vector<Message>> station_inbox_;
    std::vector<Message> federator_inbox_;
};

/// Sums the shares received from clients with identical connectivity and
/// forwards one aggregate per pattern.
void station_forward_patterns(const Topology& t, std::size_t station, Network& net) {
    std::map<StationSet, FieldVector> per_pattern;
    for (auto& m : net.take_inbox(station)) {
        if (m.kind != MessageKind::Share) throw ProtocolError("unexpected message at base station in phase a");
        const StationSet& pattern = t.gamma(m.src.index);
        auto [it, fresh] = per_pattern.try_emplace(pattern, m.payload);
        if (!fresh) it->second += m.payload;
    }
    for (auto& [pattern, sum] : per_pattern) {
        net.send({ActorId::station(station), ActorId::federator(), MessageKind::PatternAggregate, std::move(sum),
                  pattern});
    }
}

RoundResult decode(const RoundHeader& header, std::span<const Message> inbox, MessageLog log) {
    const FieldConfig field(header.modulus);
    std::map<StationSet, std::vector<std::pair<FieldElement, FieldVector>>> evals;
    const FieldVector* key_aggregate = nullptr;
    for (const auto& m : inbox) {
        if (m.dst.kind != ActorKind::Federator) continue;
        if (m.kind == MessageKind::PatternAggregate) {
            const std::size_t station = m.src.index;
            if (station >= header.alpha.size()) throw ProtocolError("aggregate from unknown base station");
            evals[*m.pattern_tag].emplace_back(FieldElement(header.alpha[station], field), m.payload);
        } else if (m.kind == MessageKind::KeyAggregate) {
            if (key_aggregate) throw ProtocolError("federator received two key aggregates");
            key_aggregate = &m.payload;
        } else {
            throw ProtocolError("federator received a " + to_string(m.kind) + " message");
        }
    }
    if (!key_aggregate) throw ProtocolError("incomplete log: no key aggregate reached the federator");

    FieldVector padded_total(field, header.d);
    std::vector<PatternSum> sums;
    for (const auto& [pattern, points] : evals) {
        if (points.size() != pattern.size()) {
            throw ProtocolError("incomplete log: pattern " + format_station_set(pattern) + " has " +
                                std::to_string(points.size()) + " of " + std::to_string(pattern.size()) +
                                " evaluations");
        }
        const SharingParams params(header.z_bs, pattern.size() - header.z_bs, header.d);
        FieldVector sum(field);
        try {
            sum = reconstruct_padded(points, params);
        } catch (const std::exception& e) {
            throw ProtocolError(std::string("interpolation failed for pattern ") + format_station_set(pattern) + ": " +
                                e.what());
        }
        padded_total += sum;
        sums.push_back({pattern, std::move(sum)});
    }
    FieldVector aggregate = padded_total - *key_aggregate;
    return RoundResult{std::move(aggregate), std::move(sums), *key_aggregate, std::move(log)};
}

}  // namespace

std::size_t randomness_dimension(const Topology& t, std::size_t d, SchemeVariant variant) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < t.n_clients(); ++i) {
        total += d;
        if (variant == SchemeVariant::Honest) total += t.z_bs() * SharingParams(t.z_bs(), t.nu(i), d).block_len();
    }
    return total;
}

RoundTrace execute_round(const Topology& t, std::span<const FieldVector> gradients, const FieldConfig& field,
                         RandomSource& rng, SchemeVariant variant) {
    if (gradients.size() != t.n_clients()) {
        throw ProtocolError("expected " + std::to_string(t.n_clients()) + " gradients, got " +
                            std::to_string(gradients.size()));
    }
    const std::size_t d = gradients.front().size();
    for (std::size_t i = 0; i < gradients.size(); ++i) {
        if (gradients[i].size() != d || d == 0) {
            throw ProtocolError("gradient of client " + std::to_string(i + 1) + " has length " +
                                std::to_string(gradients[i].size()) + ", expected " + std::to_string(d));
        }
        if (gradients[i].modulus() != field.modulus()) {
            throw ProtocolError("gradient of client " + std::to_string(i + 1) + " lives in a different field");
        }
    }
    EvaluationPointMap points;
    try {
        points = EvaluationPointMap::sequential(t.n_bs(), field);
    } catch (const SharingError& e) {
        throw ProtocolError(std::string("topology/field mismatch: ") + e.what());
    }

    RoundHeader header{field.modulus(), d, t.z_bs(), t.n_bs(), {}};
    for (const auto& [station, alpha] : points) header.alpha.push_back(alpha.value());
    MessageLog log(header);
    std::size_t expected = t.n_clients() + t.n_bs();
    for (std::size_t i = 0; i < t.n_clients(); ++i) expected += t.gamma(i).size();
    for (const auto& p : group_by_pattern(t)) expected += p.pattern.size();
    log.reserve(expected);
    Network net(log, t.n_bs());
    const bool masked = variant == SchemeVariant::Honest;

    // Phase a: key generation and sharing through the base stations.
    std::vector<ClientLocal> locals;
    locals.reserve(t.n_clients());
    for (std::size_t i = 0; i < t.n_clients(); ++i) {
        FieldVector key = rng.draw_vector(field, d);
        const SharingParams params(t.z_bs(), t.nu(i), d);
        // Record the masks by wrapping the source; they are the draws after r_i.
        class Recorder final : public RandomSource {
        public:
            explicit Recorder(RandomSource& inner) : inner_(inner) {}
            std::uint64_t draw(std::uint64_t m) override { return drawn.emplace_back(inner_.draw(m)); }
            std::vector<std::uint64_t> drawn;

        private:
            RandomSource& inner_;
        } recorder(rng);
        ShareBundle bundle = make_shares(gradients[i], key, params, points.subset(t.gamma(i)), recorder, masked);
        for (auto& [station, share] : bundle) {
            net.send({ActorId::client(i), ActorId::station(station), MessageKind::Share, std::move(share), {}});
        }
        ClientLocal local{gradients[i], std::move(key), {}};
        if (masked) {
            const std::size_t block = params.block_len();
            for (std::size_t j = 0; j < t.z_bs(); ++j) {
                local.masks.emplace_back(field, std::vector<std::uint64_t>(
                                                    recorder.drawn.begin() + static_cast<std::ptrdiff_t>(j * block),
                                                    recorder.drawn.begin() + static_cast<std::ptrdiff_t>((j + 1) * block)));
            }
        }
        locals.push_back(std::move(local));
    }
    for (std::size_t k = 0; k < t.n_bs(); ++k) station_forward_patterns(t, k, net);

    // Phase b: key aggregation along the chain 1 -> 2 -> ... -> B.
    for (std::size_t i = 0; i < t.n_clients(); ++i) {
        net.send({ActorId::client(i), ActorId::station(t.main_bs(i)), MessageKind::KeyVector, locals[i].key, {}});
    }
    for (std::size_t k = 0; k < t.n_bs(); ++k) {
        FieldVector running(field, d);
        for (const auto& m : net.take_inbox(k)) running += m.payload;
        if (k + 1 < t.n_bs()) {
            net.send({ActorId::station(k), ActorId::station(k + 1), MessageKind::KeyChainPartial, std::move(running), {}});
        } else {
            net.send({ActorId::station(k), ActorId::federator(), MessageKind::KeyAggregate, std::move(running), {}});
        }
    }

    std::vector<Message> inbox = net.federator_inbox();
    RoundResult result = decode(header, inbox, std::move(log));
    return RoundTrace{std::move(result), std::move(locals)};
}

RoundResult run_round(const Topology& t, std::span<const FieldVector> gradients, const FieldConfig& field,
                      std::uint64_t seed) {
    SeededSource rng(seed);
    return execute_round(t, gradients, field, rng, SchemeVariant::Honest).result;
}

RoundResult run_round_broken_no_masks(const Topology& t, std::span<const FieldVector> gradients,
                                      const FieldConfig& field, std::uint64_t seed) {
    SeededSource rng(seed);
    return execute_round(t, gradients, field, rng, SchemeVariant::NoMasks).result;
}

RoundResult replay(const MessageLog& log) {
    const auto& msgs = log.messages();
    if (msgs.empty()) throw ProtocolError("incomplete log: no messages");
    return decode(log.header(), msgs, log);
}

}  // namespace hierfed
