#include "hierfed/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "hierfed/random.hpp"

namespace hierfed {

namespace {

std::string format_clients(const std::vector<std::size_t>& clients) {
    std::string out = "{";
    for (std::size_t i = 0; i < clients.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(clients[i] + 1);
    }
    return out + "}";
}

std::size_t symbol_width(std::uint64_t q) {
    std::size_t w = 1;
    for (std::uint64_t m = (q - 1) >> 8; m != 0; m >>= 8) ++w;
    return w;
}

void append_symbols(std::span<const std::uint64_t> symbols, std::size_t width, std::string& out) {
    for (std::uint64_t s : symbols) {
        for (std::size_t b = 0; b < width; ++b) out.push_back(static_cast<char>((s >> (8 * b)) & 0xff));
    }
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r = saturating_mul(r, base);
    return r;
}

/// Packs symbols base q into one word; caller guarantees it fits.
std::uint64_t pack(std::span<const std::uint64_t> symbols, std::uint64_t q) {
    std::uint64_t code = 0;
    for (std::uint64_t s : symbols) code = code * q + s;
    return code;
}

/// Advances an odometer over [0, q)^n. Returns false after the last value.
bool advance(std::vector<std::uint64_t>& digits, std::uint64_t q) {
    for (auto& digit : digits) {
        if (++digit < q) return true;
        digit = 0;
    }
    return false;
}

/// Observed views interned to dense ids; the same view string recurs across
/// many randomness assignments.
class ViewInterner {
public:
    std::uint32_t id(const std::string& view) {
        if (auto it = ids_.find(view); it != ids_.end()) return it->second;
        const auto next = static_cast<std::uint32_t>(views_.size());
        ids_.emplace(view, next);
        views_.push_back(view);
        return next;
    }
    const std::string& view(std::uint32_t id) const { return views_[id]; }
    std::size_t size() const { return views_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> views_;
};

/// Per-observer accumulator: view counts for the current gradient outcome,
/// folded into the joint table when the outcome is finished.
struct Accumulator {
    ViewInterner interner;
    std::vector<std::uint64_t> counts;
    std::vector<std::uint32_t> touched;
    std::map<std::tuple<std::uint32_t, std::uint64_t, std::uint64_t, std::uint64_t>, std::uint64_t> table;

    void observe(const std::string& view) {
        const std::uint32_t id = interner.id(view);
        if (id >= counts.size()) counts.resize(id + 1, 0);
        if (counts[id]++ == 0) touched.push_back(id);
    }

    void fold(std::uint64_t honest, std::uint64_t colluding, std::uint64_t honest_sum, std::uint64_t weight) {
        for (std::uint32_t id : touched) {
            table[{id, honest, colluding, honest_sum}] += counts[id] * weight;
            counts[id] = 0;
        }
        touched.clear();
    }

    ViewDistribution finish() const {
        std::vector<ViewDistribution::Entry> entries;
        entries.reserve(table.size());
        for (const auto& [key, weight] : table) {
            const auto& [id, honest, colluding, honest_sum] = key;
            entries.push_back({interner.view(id), honest, colluding, honest_sum, weight});
        }
        // Deterministic order for reproducible reports.
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            return std::tie(a.view, a.honest, a.colluding, a.honest_sum) <
                   std::tie(b.view, b.honest, b.colluding, b.honest_sum);
        });
        return ViewDistribution(std::move(entries));
    }
};

/// Codes of the secret-side variables for one gradient outcome.
struct SecretCodes {
    std::uint64_t honest;
    std::uint64_t colluding;
    std::uint64_t honest_sum;
};

SecretCodes secret_codes(const GradientPrior::Outcome& outcome, const std::vector<std::size_t>& colluders,
                         std::size_t n_clients, std::size_t d, std::uint64_t q) {
    std::vector<std::uint64_t> honest, colluding, sum(d, 0);
    for (std::size_t i = 0; i < n_clients; ++i) {
        auto block = std::span(outcome.symbols).subspan(i * d, d);
        if (std::binary_search(colluders.begin(), colluders.end(), i)) {
            colluding.insert(colluding.end(), block.begin(), block.end());
        } else {
            honest.insert(honest.end(), block.begin(), block.end());
            for (std::size_t j = 0; j < d; ++j) sum[j] = (sum[j] + block[j]) % q;
        }
    }
    return {pack(honest, q), pack(colluding, q), pack(sum, q)};
}

}  // namespace

AdversarySpec AdversarySpec::base_stations(std::vector<std::size_t> clients, std::vector<std::size_t> stations) {
    std::sort(clients.begin(), clients.end());
    std::sort(stations.begin(), stations.end());
    return {std::move(clients), Mode::BaseStations, std::move(stations)};
}

AdversarySpec AdversarySpec::federator(std::vector<std::size_t> clients) {
    std::sort(clients.begin(), clients.end());
    return {std::move(clients), Mode::Federator, {}};
}

std::string AdversarySpec::describe() const {
    std::string out = "C=" + format_clients(colluding_clients) + ", ";
    if (mode == Mode::Federator) return out + "F";
    return out + "B" + format_clients(stations);
}

void validate_adversary(const AdversarySpec& adversary, const Topology& t) {
    const auto& c = adversary.colluding_clients;
    if (!std::is_sorted(c.begin(), c.end()) || std::adjacent_find(c.begin(), c.end()) != c.end()) {
        throw AuditError("colluding clients must be a set");
    }
    if (!c.empty() && c.back() >= t.n_clients()) throw AuditError("colluding client out of range");
    if (c.size() > t.privacy().z_ue) {
        throw AuditError(std::to_string(c.size()) + " colluding clients exceed z_ue = " +
                         std::to_string(t.privacy().z_ue));
    }
    const auto& s = adversary.stations;
    if (adversary.mode == AdversarySpec::Mode::Federator) {
        if (!s.empty()) throw AuditError("base stations do not collude with the federator");
        return;
    }
    if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end()) {
        throw AuditError("colluding base stations must be a set");
    }
    if (!s.empty() && s.back() >= t.n_bs()) throw AuditError("colluding base station out of range");
    if (s.size() > t.z_bs()) {
        throw AuditError(std::to_string(s.size()) + " colluding base stations exceed z_bs = " +
                         std::to_string(t.z_bs()));
    }
}

GradientPrior::GradientPrior(std::vector<Outcome> outcomes, std::size_t n_clients, std::size_t d, std::uint64_t q)
    : outcomes_(std::move(outcomes)), n_clients_(n_clients), d_(d), q_(q) {
    if (outcomes_.empty()) throw AuditError("gradient prior has no outcomes");
    for (const auto& o : outcomes_) {
        if (o.symbols.size() != n_clients * d) throw AuditError("gradient prior outcome has the wrong length");
        if (o.weight == 0) throw AuditError("gradient prior outcome with zero weight");
        for (auto s : o.symbols) {
            if (s >= q) throw AuditError("gradient prior symbol outside F_q");
        }
    }
}

GradientPrior GradientPrior::uniform(std::size_t n_clients, std::size_t d, const FieldConfig& field) {
    const std::uint64_t q = field.modulus();
    if (saturating_pow(q, n_clients * d) > kDefaultAuditBudget) throw BudgetExceeded("uniform prior support too large");
    std::vector<Outcome> outcomes;
    std::vector<std::uint64_t> digits(n_clients * d, 0);
    do {
        // Odometer digit 0 varies fastest; store client-major.
        outcomes.push_back({std::vector<std::uint64_t>(digits.rbegin(), digits.rend()), 1});
    } while (advance(digits, q));
    return GradientPrior(std::move(outcomes), n_clients, d, q);
}

GradientPrior GradientPrior::point_mass(std::vector<std::uint64_t> symbols, std::size_t n_clients, std::size_t d,
                                        const FieldConfig& field) {
    return GradientPrior({{std::move(symbols), 1}}, n_clients, d, field.modulus());
}

GradientPrior GradientPrior::all_equal(std::size_t n_clients, std::size_t d, const FieldConfig& field) {
    const std::uint64_t q = field.modulus();
    std::vector<Outcome> outcomes;
    std::vector<std::uint64_t> digits(d, 0);
    do {
        std::vector<std::uint64_t> symbols;
        for (std::size_t i = 0; i < n_clients; ++i) symbols.insert(symbols.end(), digits.rbegin(), digits.rend());
        outcomes.push_back({std::move(symbols), 1});
    } while (advance(digits, q));
    return GradientPrior(std::move(outcomes), n_clients, d, q);
}

GradientPrior GradientPrior::custom(std::vector<Outcome> outcomes, std::size_t n_clients, std::size_t d,
                                    const FieldConfig& field) {
    return GradientPrior(std::move(outcomes), n_clients, d, field.modulus());
}

ViewDistribution::ViewDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (const auto& e : entries_) total_ += e.weight;
}

std::size_t ViewDistribution::view_support() const {
    std::vector<std::string_view> views;
    for (const auto& e : entries_) views.push_back(e.view);
    std::sort(views.begin(), views.end());
    return static_cast<std::size_t>(std::unique(views.begin(), views.end()) - views.begin());
}

namespace {

struct Marginals {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> z;
    std::map<std::tuple<std::string_view, std::uint64_t, std::uint64_t>, std::uint64_t> vz;
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>, std::uint64_t> xz;
};

std::pair<std::uint64_t, std::uint64_t> cond_key(const ViewDistribution::Entry& e, Conditioning c) {
    return {e.colluding, c == Conditioning::Aggregate ? e.honest_sum : 0};
}

Marginals marginals(const ViewDistribution& dist, Conditioning c) {
    Marginals m;
    for (const auto& e : dist.entries()) {
        const auto z = cond_key(e, c);
        m.z[z] += e.weight;
        m.vz[{e.view, z.first, z.second}] += e.weight;
        m.xz[{e.honest, z.first, z.second}] += e.weight;
    }
    return m;
}

}  // namespace

bool exactly_independent(const ViewDistribution& dist, Conditioning conditioning) {
    const Marginals m = marginals(dist, conditioning);
    // p(v,x,z) p(z) == p(v,z) p(x,z) on the support implies it everywhere.
    for (const auto& e : dist.entries()) {
        const auto z = cond_key(e, conditioning);
        const unsigned __int128 lhs = static_cast<unsigned __int128>(e.weight) * m.z.at(z);
        const unsigned __int128 rhs = static_cast<unsigned __int128>(m.vz.at({e.view, z.first, z.second})) *
                                      m.xz.at({e.honest, z.first, z.second});
        if (lhs != rhs) return false;
    }
    return true;
}

double mutual_information_bits(const ViewDistribution& dist, Conditioning conditioning) {
    if (dist.entries().empty()) return 0.0;
    if (exactly_independent(dist, conditioning)) return 0.0;
    const Marginals m = marginals(dist, conditioning);
    const long double total = static_cast<long double>(dist.total_weight());
    long double mi = 0;
    for (const auto& e : dist.entries()) {
        const auto z = cond_key(e, conditioning);
        const long double num = static_cast<long double>(e.weight) * static_cast<long double>(m.z.at(z));
        const long double den = static_cast<long double>(m.vz.at({e.view, z.first, z.second})) *
                                static_cast<long double>(m.xz.at({e.honest, z.first, z.second}));
        mi += static_cast<long double>(e.weight) / total * std::log2(num / den);
    }
    return static_cast<double>(std::max<long double>(mi, 0));
}

namespace {

bool is_party(const AdversarySpec& adversary, const ActorId& a) {
    switch (a.kind) {
        case ActorKind::Client:
            return std::binary_search(adversary.colluding_clients.begin(), adversary.colluding_clients.end(), a.index);
        case ActorKind::BaseStation:
            return adversary.mode == AdversarySpec::Mode::BaseStations &&
                   std::binary_search(adversary.stations.begin(), adversary.stations.end(), a.index);
        case ActorKind::Federator:
            return adversary.mode == AdversarySpec::Mode::Federator;
    }
    return false;
}

void append_locals(std::span<const ClientLocal> colluder_locals, std::size_t width, std::string& out) {
    for (const auto& local : colluder_locals) {
        append_symbols(local.gradient.raw(), width, out);
        append_symbols(local.key.raw(), width, out);
        for (const auto& t : local.masks) append_symbols(t.raw(), width, out);
    }
}

/// Indices of the messages a coalition observes. The schedule of a round is
/// fixed by the topology, so the plan is computed once per enumeration.
std::vector<std::size_t> message_plan(const AdversarySpec& adversary, const MessageLog& log) {
    std::vector<std::size_t> plan;
    const auto& msgs = log.messages();
    for (std::size_t k = 0; k < msgs.size(); ++k) {
        if (is_party(adversary, msgs[k].src) || is_party(adversary, msgs[k].dst)) plan.push_back(k);
    }
    return plan;
}

}  // namespace

ViewExtractor standard_extractor(const AdversarySpec& adversary) {
    return [adversary](const MessageLog& log, std::span<const ClientLocal> colluder_locals, std::string& out) {
        const std::size_t width = symbol_width(log.header().modulus);
        append_locals(colluder_locals, width, out);
        for (const auto& m : log.messages()) {
            if (is_party(adversary, m.src) || is_party(adversary, m.dst)) append_symbols(m.payload.raw(), width, out);
        }
    };
}

std::uint64_t enumeration_size(const Topology& t, const FieldConfig& field, std::size_t d, const GradientPrior& prior,
                               SchemeVariant variant) {
    return saturating_mul(prior.outcomes().size(),
                          saturating_pow(field.modulus(), randomness_dimension(t, d, variant)));
}

std::vector<ViewDistribution> enumerate_observers(const Topology& t, const FieldConfig& field, std::size_t d,
                                                  const std::vector<Observer>& observers, const GradientPrior& prior,
                                                  SchemeVariant variant, std::uint64_t budget) {
    const std::uint64_t q = field.modulus();
    if (prior.n_clients() != t.n_clients() || prior.d() != d || prior.modulus() != q) {
        throw AuditError("gradient prior does not match the topology, d or field");
    }
    if (saturating_pow(q, t.n_clients() * d) == std::numeric_limits<std::uint64_t>::max()) {
        throw BudgetExceeded("secret space too large to pack");
    }
    const std::uint64_t states = enumeration_size(t, field, d, prior, variant);
    if (states > budget) {
        throw BudgetExceeded("enumeration needs " +
                             (states == std::numeric_limits<std::uint64_t>::max() ? std::string("> 2^64")
                                                                                  : std::to_string(states)) +
                             " states, budget is " + std::to_string(budget));
    }
    for (const auto& o : observers) validate_adversary(o.adversary, t);

    const std::size_t rand_dims = randomness_dimension(t, d, variant);
    std::vector<Accumulator> acc(observers.size());
    std::vector<std::uint64_t> script(rand_dims);
    std::string view;
    // Observers sharing a client coalition share one copy of its local state.
    std::vector<std::vector<std::size_t>> coalitions;
    std::vector<std::size_t> coalition_of;
    for (const auto& o : observers) {
        auto it = std::find(coalitions.begin(), coalitions.end(), o.adversary.colluding_clients);
        coalition_of.push_back(static_cast<std::size_t>(it - coalitions.begin()));
        if (it == coalitions.end()) coalitions.push_back(o.adversary.colluding_clients);
    }
    std::vector<std::vector<ClientLocal>> colluder_locals(coalitions.size());
    std::vector<std::vector<std::size_t>> plans;
    std::size_t schedule_size = 0;
    const std::size_t width = symbol_width(q);

    for (const auto& outcome : prior.outcomes()) {
        std::vector<FieldVector> gradients;
        for (std::size_t i = 0; i < t.n_clients(); ++i) {
            gradients.emplace_back(field, std::vector<std::uint64_t>(outcome.symbols.begin() + static_cast<std::ptrdiff_t>(i * d),
                                                                     outcome.symbols.begin() + static_cast<std::ptrdiff_t>((i + 1) * d)));
        }
        std::vector<SecretCodes> codes;
        for (const auto& o : observers) {
            codes.push_back(secret_codes(outcome, o.adversary.colluding_clients, t.n_clients(), d, q));
        }
        std::fill(script.begin(), script.end(), 0);
        do {
            ScriptedSource rng(script);
            RoundTrace trace = execute_round(t, gradients, field, rng, variant);
            for (std::size_t g = 0; g < coalitions.size(); ++g) {
                colluder_locals[g].clear();
                for (std::size_t c : coalitions[g]) colluder_locals[g].push_back(trace.locals[c]);
            }
            const auto& msgs = trace.result.log.messages();
            if (plans.empty()) {
                schedule_size = msgs.size();
                for (const auto& o : observers) plans.push_back(message_plan(o.adversary, trace.result.log));
            } else if (msgs.size() != schedule_size) {
                throw AuditError("message schedule changed between enumerated rounds");
            }
            for (std::size_t a = 0; a < observers.size(); ++a) {
                view.clear();
                const auto& locals = colluder_locals[coalition_of[a]];
                if (observers[a].extract) {
                    observers[a].extract(trace.result.log, locals, view);
                } else {
                    append_locals(locals, width, view);
                    for (std::size_t k : plans[a]) append_symbols(msgs[k].payload.raw(), width, view);
                }
                acc[a].observe(view);
            }
        } while (advance(script, q));
        for (std::size_t a = 0; a < observers.size(); ++a) {
            acc[a].fold(codes[a].honest, codes[a].colluding, codes[a].honest_sum, outcome.weight);
        }
    }

    std::vector<ViewDistribution> out;
    out.reserve(acc.size());
    for (const auto& a : acc) out.push_back(a.finish());
    return out;
}

ViewDistribution enumerate_views(const Topology& t, const FieldConfig& field, std::size_t d,
                                 const AdversarySpec& adversary, const GradientPrior& prior, SchemeVariant variant,
                                 std::uint64_t budget) {
    return std::move(
        enumerate_observers(t, field, d, {{adversary, {}}}, prior, variant, budget).front());
}

std::vector<AdversarySpec> all_adversaries(const Topology& t) {
    const auto subsets = [](std::size_t n, std::size_t max_size) {
        std::vector<std::vector<std::size_t>> out;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            std::vector<std::size_t> s;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask >> i & 1) s.push_back(i);
            }
            if (s.size() <= max_size) out.push_back(std::move(s));
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        return out;
    };
    const auto client_sets = subsets(t.n_clients(), t.privacy().z_ue);
    const auto station_sets = subsets(t.n_bs(), t.z_bs());
    std::vector<AdversarySpec> out;
    for (const auto& c : client_sets) {
        for (const auto& s : station_sets) out.push_back(AdversarySpec::base_stations(c, s));
    }
    for (const auto& c : client_sets) out.push_back(AdversarySpec::federator(c));
    return out;
}

AuditReport audit_matrix(const Topology& t, const FieldConfig& field, std::size_t d, const GradientPrior& prior,
                         SchemeVariant variant, std::uint64_t budget) {
    const auto adversaries = all_adversaries(t);
    std::vector<Observer> observers;
    for (const auto& a : adversaries) observers.push_back({a, {}});
    const auto dists = enumerate_observers(t, field, d, observers, prior, variant, budget);

    AuditReport report;
    report.max_mi = -1.0;
    for (std::size_t k = 0; k < adversaries.size(); ++k) {
        const bool federator = adversaries[k].mode == AdversarySpec::Mode::Federator;
        const double mi = mutual_information_bits(dists[k], federator ? Conditioning::Aggregate : Conditioning::None);
        const bool pass = mi <= kZeroLeakageTolerance;
        report.lines.push_back({federator ? "ii" : "i", adversaries[k], mi, pass});
        if (mi > report.max_mi) {
            report.max_mi = mi;
            report.worst = adversaries[k];
        }
        report.pass = report.pass && pass;
    }
    return report;
}

std::string AuditReport::to_text() const {
    std::ostringstream os;
    for (const auto& line : lines) {
        os << line.case_label << ", " << format_clients(line.adversary.colluding_clients) << ", ";
        if (line.adversary.mode == AdversarySpec::Mode::Federator) {
            os << 'F';
        } else {
            os << 'B' << format_clients(line.adversary.stations);
        }
        char mi[32];
        std::snprintf(mi, sizeof mi, "%.9f", line.mi_bits);
        os << ", " << mi << ", " << (line.pass ? "PASS" : "FAIL") << '\n';
    }
    return os.str();
}

namespace {

/// Enumerates every secret in F_q^d and every mask assignment, producing
/// the table of (shares at `subset`, secret).
ViewDistribution share_table(const FieldConfig& field, const SharingParams& params, const EvaluationPointMap& points,
                             const std::vector<std::size_t>& subset) {
    const std::uint64_t q = field.modulus();
    const std::size_t mask_dims = params.z_bs * params.block_len();
    if (saturating_mul(saturating_pow(q, params.d), saturating_pow(q, mask_dims)) > kDefaultAuditBudget) {
        throw BudgetExceeded("share enumeration too large");
    }
    const std::size_t width = symbol_width(q);
    Accumulator acc;
    std::vector<std::uint64_t> secret(params.d, 0);
    std::vector<std::uint64_t> masks(mask_dims, 0);
    const FieldVector zero(field, params.d);
    std::string view;
    do {
        const FieldVector s(field, secret);
        std::fill(masks.begin(), masks.end(), 0);
        do {
            ScriptedSource rng(masks);
            const ShareBundle bundle = make_shares(s, zero, params, points, rng);
            view.clear();
            for (std::size_t k : subset) append_symbols(bundle.at(k).raw(), width, view);
            acc.observe(view);
        } while (advance(masks, q));
        acc.fold(pack(secret, q), 0, 0, 1);
    } while (advance(secret, q));
    return acc.finish();
}

}  // namespace

double share_subset_leakage_bits(const FieldConfig& field, const SharingParams& params,
                                 const EvaluationPointMap& points, const std::vector<std::size_t>& subset) {
    return mutual_information_bits(share_table(field, params, points, subset), Conditioning::None);
}

bool share_subset_reconstructs(const FieldConfig& field, const SharingParams& params,
                               const EvaluationPointMap& points, const std::vector<std::size_t>& subset) {
    const std::uint64_t q = field.modulus();
    const std::size_t mask_dims = params.z_bs * params.block_len();
    std::vector<std::uint64_t> secret(params.d, 0);
    std::vector<std::uint64_t> masks(mask_dims, 0);
    const FieldVector zero(field, params.d);
    do {
        const FieldVector s(field, secret);
        std::fill(masks.begin(), masks.end(), 0);
        do {
            ScriptedSource rng(masks);
            const ShareBundle bundle = make_shares(s, zero, params, points, rng);
            std::vector<std::pair<FieldElement, FieldVector>> evals;
            for (std::size_t k : subset) evals.emplace_back(points.at(k), bundle.at(k));
            try {
                if (reconstruct_padded(evals, params) != s) return false;
            } catch (const SharingError&) {
                return false;
            }
        } while (advance(masks, q));
    } while (advance(secret, q));
    return true;
}

}  // namespace hierfed
