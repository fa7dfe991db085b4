#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierfed/field.hpp"
#include "hierfed/protocol.hpp"
#include "hierfed/sharing.hpp"
#include "hierfed/topology.hpp"

namespace hierfed {

class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Enumeration would exceed the configured state budget.
class BudgetExceeded : public AuditError {
public:
    using AuditError::AuditError;
};

inline constexpr std::uint64_t kDefaultAuditBudget = 100'000'000;
inline constexpr double kZeroLeakageTolerance = 1e-9;

/// A coalition of curious parties: clients C together with either base
/// stations B or the federator.
struct AdversarySpec {
    enum class Mode { BaseStations, Federator };

    std::vector<std::size_t> colluding_clients;
    Mode mode = Mode::BaseStations;
    std::vector<std::size_t> stations;

    static AdversarySpec base_stations(std::vector<std::size_t> clients, std::vector<std::size_t> stations);
    static AdversarySpec federator(std::vector<std::size_t> clients);

    /// "C={1}, B{2}" style label, 1-based.
    std::string describe() const;
    friend bool operator==(const AdversarySpec&, const AdversarySpec&) = default;
};

/// Throws AuditError unless the coalition respects z_ue / z_bs.
void validate_adversary(const AdversarySpec& adversary, const Topology& t);

/// Joint distribution of all clients' gradients with integer weights.
/// Each outcome lists N * d symbols, client-major.
class GradientPrior {
public:
    struct Outcome {
        std::vector<std::uint64_t> symbols;
        std::uint64_t weight;
    };

    /// i.i.d. uniform over F_q for every client and coordinate.
    static GradientPrior uniform(std::size_t n_clients, std::size_t d, const FieldConfig& field);
    /// All mass on one gradient profile.
    static GradientPrior point_mass(std::vector<std::uint64_t> symbols, std::size_t n_clients, std::size_t d,
                                    const FieldConfig& field);
    /// Correlated: every client holds the same uniformly random gradient.
    static GradientPrior all_equal(std::size_t n_clients, std::size_t d, const FieldConfig& field);
    static GradientPrior custom(std::vector<Outcome> outcomes, std::size_t n_clients, std::size_t d,
                                const FieldConfig& field);

    std::size_t n_clients() const { return n_clients_; }
    std::size_t d() const { return d_; }
    std::uint64_t modulus() const { return q_; }
    const std::vector<Outcome>& outcomes() const { return outcomes_; }

private:
    GradientPrior(std::vector<Outcome> outcomes, std::size_t n_clients, std::size_t d, std::uint64_t q);

    std::vector<Outcome> outcomes_;
    std::size_t n_clients_;
    std::size_t d_;
    std::uint64_t q_;
};

/// Exact joint table over (adversary view, honest gradients), with the
/// colluders' gradients and the honest clients' gradient sum carried along
/// as conditioning variables. Probabilities are weight / total_weight.
class ViewDistribution {
public:
    struct Entry {
        std::string view;           ///< packed observed symbols
        std::uint64_t honest;       ///< g^{[N]\C}, packed base q
        std::uint64_t colluding;    ///< g^C, packed base q
        std::uint64_t honest_sum;   ///< sum_{i not in C} g_i, packed base q
        std::uint64_t weight;
    };

    ViewDistribution() = default;
    ViewDistribution(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::uint64_t total_weight() const { return total_; }
    /// Number of distinct views with positive probability.
    std::size_t view_support() const;

private:
    std::vector<Entry> entries_;
    std::uint64_t total_ = 0;
};

enum class Conditioning {
    None,       ///< I(view; g_H | g_C)
    Aggregate,  ///< I(view; g_H | sum g_H, g_C)
};

/// Exact conditional mutual information in bits. When the table factorises
/// exactly (checked in integer arithmetic) the result is exactly 0.0;
/// otherwise the logarithms are evaluated in long double.
double mutual_information_bits(const ViewDistribution& dist, Conditioning conditioning);

/// True iff view and honest gradients are exactly conditionally independent.
bool exactly_independent(const ViewDistribution& dist, Conditioning conditioning);

/// Appends the symbols a coalition observes in one round. Receives the log
/// and only the colluding clients' local state.
using ViewExtractor =
    std::function<void(const MessageLog& log, std::span<const ClientLocal> colluder_locals, std::string& out)>;

/// Standard observation model: colluders' own g, r, t; every message whose
/// source or destination is a colluding party.
ViewExtractor standard_extractor(const AdversarySpec& adversary);

/// An empty `extract` selects the standard observation model, evaluated
/// through a precomputed message plan.
struct Observer {
    AdversarySpec adversary;
    ViewExtractor extract;
};

/// Runs the protocol on every (gradient outcome, randomness assignment)
/// pair and accumulates one ViewDistribution per observer in a single pass.
std::vector<ViewDistribution> enumerate_observers(const Topology& t, const FieldConfig& field, std::size_t d,
                                                  const std::vector<Observer>& observers, const GradientPrior& prior,
                                                  SchemeVariant variant = SchemeVariant::Honest,
                                                  std::uint64_t budget = kDefaultAuditBudget);

ViewDistribution enumerate_views(const Topology& t, const FieldConfig& field, std::size_t d,
                                 const AdversarySpec& adversary, const GradientPrior& prior,
                                 SchemeVariant variant = SchemeVariant::Honest,
                                 std::uint64_t budget = kDefaultAuditBudget);

/// Total enumeration size for a configuration (saturates at UINT64_MAX).
std::uint64_t enumeration_size(const Topology& t, const FieldConfig& field, std::size_t d, const GradientPrior& prior,
                               SchemeVariant variant = SchemeVariant::Honest);

struct AuditLine {
    std::string case_label;  ///< "i" (base stations) or "ii" (federator)
    AdversarySpec adversary;
    double mi_bits;
    bool pass;
};

struct AuditReport {
    std::vector<AuditLine> lines;
    double max_mi = 0.0;
    AdversarySpec worst;
    bool pass = true;

    /// `case, C, B_or_F, MI_bits, verdict` per adversary.
    std::string to_text() const;
};

/// Every coalition up to the topology's z_ue / z_bs bounds, both cases.
std::vector<AdversarySpec> all_adversaries(const Topology& t);

AuditReport audit_matrix(const Topology& t, const FieldConfig& field, std::size_t d, const GradientPrior& prior,
                         SchemeVariant variant = SchemeVariant::Honest, std::uint64_t budget = kDefaultAuditBudget);

/// Leakage of a subset of shares about a uniformly random secret, with
/// uniformly random masks, for a single ramp-shared vector.
double share_subset_leakage_bits(const FieldConfig& field, const SharingParams& params,
                                 const EvaluationPointMap& points, const std::vector<std::size_t>& subset);

/// Whether the subset of shares reconstructs every secret exactly, for
/// every mask assignment.
bool share_subset_reconstructs(const FieldConfig& field, const SharingParams& params,
                               const EvaluationPointMap& points, const std::vector<std::size_t>& subset);

}  // namespace hierfed
