#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hierfed/topology.hpp"

namespace hierfed {

enum class Command { Simulate, Sweep, Audit, Train };

Command parse_command(std::string_view name);
std::string to_string(Command command);

/// Exit codes of the command-line front end.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kConfig = 2;  ///< bad config or topology
inline constexpr int kPrivacyFail = 3;
inline constexpr int kBudget = 4;
inline constexpr int kNumeric = 5;
}  // namespace exit_code

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct RunConfig {
    Command command = Command::Simulate;

    // Topology: inline (gamma + main_bs) or generated.
    std::size_t n_clients = 0;
    std::size_t n_bs = 0;
    std::size_t z_bs = 0;
    std::size_t z_ue = 0;
    std::optional<std::vector<StationSet>> gamma;
    std::optional<std::vector<std::size_t>> main_bs;
    std::size_t nu_lo = 0;  ///< 0 = not given
    std::size_t nu_hi = 0;
    std::optional<std::uint64_t> topology_seed;

    std::optional<std::uint64_t> q;  ///< unset: 2^31-1, or 2^61-1 for training
    std::size_t d = 0;
    std::uint64_t seed = 0;
    std::string out;

    // audit
    std::string prior = "uniform";
    std::vector<std::uint64_t> point;
    std::uint64_t budget = 100'000'000;
    bool broken = false;

    // train
    double eta = 0.1;
    std::size_t iters = 20;
    std::size_t samples = 8;
    double noise = 0.1;
    double scale = 65536.0;
    double clip = 1.0e6;
    std::vector<double> w0;
    std::vector<double> w_true;
    std::string data_file;
    bool compare_plaintext = false;

    std::uint64_t modulus() const;
};

/// `key = value` lines, `#` comments. Validates the keys the command needs.
RunConfig parse_config(std::string_view text, Command command);

/// Builds the topology a config describes (inline or generated).
Topology topology_from_config(const RunConfig& cfg);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_audit(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);

/// Dispatches and maps every error to its exit code with a one-line
/// diagnostic on `err`.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Reads the config file, parses it and runs the command.
int run_cli(Command command, const std::string& config_path, bool broken, const std::string& out_path,
            std::ostream& out, std::ostream& err);

}  // namespace hierfed
