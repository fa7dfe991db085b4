#include "hierfed/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "hierfed/cost.hpp"
#include "hierfed/field.hpp"
#include "hierfed/learning.hpp"
#include "hierfed/privacy.hpp"
#include "hierfed/protocol.hpp"
#include "hierfed/random.hpp"

namespace hierfed {

Command parse_command(std::string_view name) {
    if (name == "simulate") return Command::Simulate;
    if (name == "sweep") return Command::Sweep;
    if (name == "audit") return Command::Audit;
    if (name == "train") return Command::Train;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string to_string(Command command) {
    switch (command) {
        case Command::Simulate: return "simulate";
        case Command::Sweep: return "sweep";
        case Command::Audit: return "audit";
        case Command::Train: return "train";
    }
    return "?";
}

std::uint64_t RunConfig::modulus() const {
    if (q) return *q;
    return command == Command::Train ? FieldConfig::kMersenne61 : FieldConfig::kMersenne31;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::uint64_t parse_uint(std::string_view text, std::string_view key, std::size_t line) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + std::string(key) + "' expects a non-negative integer, got '" + std::string(text) + "'",
                          line);
    }
    return value;
}

double parse_double(std::string_view text, std::string_view key, std::size_t line) {
    double value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'", line);
    }
    return value;
}

bool parse_bool(std::string_view text, std::string_view key, std::size_t line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("key '" + std::string(key) + "' expects true or false, got '" + std::string(text) + "'", line);
}

std::vector<std::uint64_t> parse_uint_list(std::string_view text, std::string_view key, std::size_t line) {
    std::vector<std::uint64_t> out;
    for (auto part : split(text, ',')) out.push_back(parse_uint(part, key, line));
    return out;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view key, std::size_t line) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_double(part, key, line));
    return out;
}

/// 1-based station number -> 0-based index.
std::size_t station_index(std::uint64_t one_based, std::string_view key, std::size_t line) {
    if (one_based == 0) throw ConfigError("key '" + std::string(key) + "': base stations are numbered from 1", line);
    return static_cast<std::size_t>(one_based - 1);
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "n_clients", "n_bs",   "z_bs",    "z_ue",    "gamma", "main_bs",   "nu",         "topology_seed",
    "q",         "d",      "seed",    "out",     "prior", "point",     "budget",     "eta",
    "iters",     "samples", "noise",  "scale",   "clip",  "w0",        "w_true",     "data_file",
    "compare_plaintext"};

}  // namespace

RunConfig parse_config(std::string_view text, Command command) {
    RunConfig cfg;
    cfg.command = command;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t q_line = 0;

    std::size_t line_no = 0;
    for (auto raw_line : split(text, '\n')) {
        ++line_no;
        auto line = raw_line;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!kKnownKeys.contains(key)) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
        if (auto [it, fresh] = seen.emplace(std::string(key), line_no); !fresh) {
            throw ConfigError("key '" + std::string(key) + "' repeated (first on line " + std::to_string(it->second) + ")",
                              line_no);
        }

        if (key == "n_clients") {
            cfg.n_clients = parse_uint(value, key, line_no);
        } else if (key == "n_bs") {
            cfg.n_bs = parse_uint(value, key, line_no);
        } else if (key == "z_bs") {
            cfg.z_bs = parse_uint(value, key, line_no);
        } else if (key == "z_ue") {
            cfg.z_ue = parse_uint(value, key, line_no);
        } else if (key == "gamma") {
            std::vector<StationSet> gamma;
            for (auto client : split(value, ';')) {
                StationSet set;
                for (auto s : parse_uint_list(client, key, line_no)) set.push_back(station_index(s, key, line_no));
                gamma.push_back(std::move(set));
            }
            cfg.gamma = std::move(gamma);
        } else if (key == "main_bs") {
            std::vector<std::size_t> main;
            for (auto s : parse_uint_list(value, key, line_no)) main.push_back(station_index(s, key, line_no));
            cfg.main_bs = std::move(main);
        } else if (key == "nu") {
            if (const auto dots = value.find(".."); dots != std::string_view::npos) {
                cfg.nu_lo = parse_uint(trim(value.substr(0, dots)), key, line_no);
                cfg.nu_hi = parse_uint(trim(value.substr(dots + 2)), key, line_no);
            } else {
                cfg.nu_lo = cfg.nu_hi = parse_uint(value, key, line_no);
            }
            if (cfg.nu_lo == 0 || cfg.nu_lo > cfg.nu_hi) {
                throw ConfigError("key 'nu' needs 1 <= lo <= hi, got '" + std::string(value) + "'", line_no);
            }
        } else if (key == "topology_seed") {
            cfg.topology_seed = parse_uint(value, key, line_no);
        } else if (key == "q") {
            cfg.q = parse_uint(value, key, line_no);
            q_line = line_no;
        } else if (key == "d") {
            cfg.d = parse_uint(value, key, line_no);
        } else if (key == "seed") {
            cfg.seed = parse_uint(value, key, line_no);
        } else if (key == "out") {
            cfg.out = std::string(value);
        } else if (key == "prior") {
            if (value != "uniform" && value != "point" && value != "all_equal") {
                throw ConfigError("key 'prior' must be uniform, point or all_equal, got '" + std::string(value) + "'",
                                  line_no);
            }
            cfg.prior = std::string(value);
        } else if (key == "point") {
            cfg.point = parse_uint_list(value, key, line_no);
        } else if (key == "budget") {
            cfg.budget = parse_uint(value, key, line_no);
        } else if (key == "eta") {
            cfg.eta = parse_double(value, key, line_no);
        } else if (key == "iters") {
            cfg.iters = parse_uint(value, key, line_no);
        } else if (key == "samples") {
            cfg.samples = parse_uint(value, key, line_no);
        } else if (key == "noise") {
            cfg.noise = parse_double(value, key, line_no);
        } else if (key == "scale") {
            cfg.scale = parse_double(value, key, line_no);
        } else if (key == "clip") {
            cfg.clip = parse_double(value, key, line_no);
        } else if (key == "w0") {
            cfg.w0 = parse_double_list(value, key, line_no);
        } else if (key == "w_true") {
            cfg.w_true = parse_double_list(value, key, line_no);
        } else if (key == "data_file") {
            cfg.data_file = std::string(value);
        } else if (key == "compare_plaintext") {
            cfg.compare_plaintext = parse_bool(value, key, line_no);
        }
    }

    const auto require = [&](std::string_view key) {
        if (!seen.contains(key)) {
            throw ConfigError("missing required key '" + std::string(key) + "' for command " + to_string(command));
        }
    };
    require("n_clients");
    require("n_bs");
    if (command != Command::Audit) require("d");
    if (command == Command::Audit && !seen.contains("d")) cfg.d = 1;
    if (command == Command::Sweep) require("nu");
    if (cfg.d == 0) throw ConfigError("key 'd' must be at least 1", seen.contains("d") ? seen.at("d") : 0);
    if (cfg.n_clients == 0) throw ConfigError("key 'n_clients' must be at least 1", seen.at("n_clients"));
    if (cfg.n_bs == 0) throw ConfigError("key 'n_bs' must be at least 1", seen.at("n_bs"));
    if (command != Command::Sweep && cfg.nu_lo != cfg.nu_hi) {
        throw ConfigError("key 'nu' takes a single value for command " + to_string(command), seen.at("nu"));
    }
    if (cfg.gamma.has_value() != cfg.main_bs.has_value()) {
        throw ConfigError("keys 'gamma' and 'main_bs' must be given together");
    }
    if (cfg.prior == "point" && cfg.point.empty()) throw ConfigError("prior = point needs key 'point'");

    try {
        const FieldConfig field(cfg.modulus());
        if (command != Command::Sweep && field.modulus() <= cfg.n_bs) {
            throw ConfigError("q = " + std::to_string(field.modulus()) + " must exceed n_bs = " + std::to_string(cfg.n_bs),
                              q_line);
        }
    } catch (const FieldError& e) {
        throw ConfigError(std::string("key 'q': ") + e.what(), q_line);
    }
    return cfg;
}

Topology topology_from_config(const RunConfig& cfg) {
    if (cfg.gamma) {
        return build_topology(cfg.n_clients, cfg.n_bs, *cfg.gamma, *cfg.main_bs, {cfg.z_ue, cfg.z_bs});
    }
    const std::uint64_t seed = cfg.topology_seed.value_or(cfg.seed);
    if (cfg.nu_lo != 0) return random_topology(cfg.n_clients, cfg.n_bs, cfg.z_bs, cfg.nu_lo, seed, cfg.z_ue);
    return random_mixed_topology(cfg.n_clients, cfg.n_bs, cfg.z_bs, seed, cfg.z_ue);
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    f << contents;
    if (!f) throw ConfigError("failed writing output file '" + path + "'");
}

const char* verdict(bool ok) { return ok ? "OK" : "VIOLATED"; }

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const Topology t = topology_from_config(cfg);
    const FieldConfig field(cfg.modulus());
    std::mt19937_64 seeds(cfg.seed);
    SeededSource gradient_rng(seeds());
    const std::uint64_t round_seed = seeds();

    std::vector<FieldVector> gradients;
    FieldVector plain(field, cfg.d);
    for (std::size_t i = 0; i < t.n_clients(); ++i) {
        gradients.push_back(gradient_rng.draw_vector(field, cfg.d));
        plain += gradients.back();
    }
    const RoundResult result = cfg.broken ? run_round_broken_no_masks(t, gradients, field, round_seed)
                                          : run_round(t, gradients, field, round_seed);
    const CostReport cost = measure(result.log, t);

    std::uint64_t checksum = 0;
    for (std::uint64_t v : result.aggregate.raw()) checksum = detail::add_mod(checksum, v, field.modulus());

    out << "topology N=" << t.n_clients() << " B=" << t.n_bs() << " z_bs=" << t.z_bs() << " z_ue=" << t.privacy().z_ue
        << " patterns=" << group_by_pattern(t).size() << " gamma=" << t.gamma_string() << '\n';
    out << "aggregate checksum=" << checksum << " plaintext_sum " << (result.aggregate == plain ? "OK" : "MISMATCH")
        << '\n';
    out << "c_ue measured=" << cost.c_ue << " predicted=" << cost.predicted_c_ue << '\n';
    out << "c_bs measured=" << cost.c_bs << " predicted=" << cost.predicted_c_bs << '\n';
    out << "c_bsf measured=" << cost.c_bsf << " predicted=" << cost.predicted_c_bsf << '\n';
    out << "c_total=" << cost.c_total << '\n';
    out << "measured==predicted " << (cost.matches_prediction() ? "OK" : "MISMATCH") << '\n';
    const Rational ratio = Rational(boost::multiprecision::cpp_int(cost.c_total)) / cost.c_min;
    out << "c_min=" << to_decimal(cost.c_min) << " c_total>=c_min " << verdict(cost.c_total >= cost.c_min) << '\n';
    out << "ratio c_total/c_min=" << to_decimal(ratio, 8) << " bound=" << to_decimal(cost.ratio_bound, 8) << ' '
        << verdict(ratio < cost.ratio_bound) << '\n';
    out << "beta=" << to_decimal(cost.beta, 8) << '\n';
    out << "loose bounds [" << to_decimal(cost.loose_lower) << ", " << to_decimal(cost.loose_upper) << "]\n";

    if (!cfg.out.empty()) write_file(cfg.out, result.log.export_text());
    const bool ok = result.aggregate == plain && cost.matches_prediction();
    return ok ? exit_code::kOk : exit_code::kInternal;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const auto rows = sweep_costs(cfg.n_clients, cfg.n_bs, cfg.z_bs, cfg.d, cfg.nu_lo, cfg.nu_hi);
    const std::string csv = sweep_csv(rows);
    if (cfg.out.empty()) {
        out << csv;
    } else {
        write_file(cfg.out, csv);
        out << "wrote " << rows.size() << " rows to " << cfg.out << '\n';
    }
    // The closed-form lower bound and the alternative lower-bound curve differ;
    // report both, labelled.
    for (const auto& r : rows) {
        out << "nu=" << r.nu << " c_min_closed_form=" << to_decimal(r.c_min_norm)
            << " c_min_curve=" << to_decimal(r.c_min_curve_norm) << '\n';
    }
    return exit_code::kOk;
}

int cmd_audit(const RunConfig& cfg, std::ostream& out) {
    const Topology t = topology_from_config(cfg);
    const FieldConfig field(cfg.modulus());
    GradientPrior prior = [&] {
        if (cfg.prior == "point") return GradientPrior::point_mass(cfg.point, t.n_clients(), cfg.d, field);
        if (cfg.prior == "all_equal") return GradientPrior::all_equal(t.n_clients(), cfg.d, field);
        return GradientPrior::uniform(t.n_clients(), cfg.d, field);
    }();
    const auto report = audit_matrix(t, field, cfg.d, prior, cfg.broken ? SchemeVariant::NoMasks : SchemeVariant::Honest,
                                     cfg.budget);
    out << report.to_text();
    char mi[32];
    std::snprintf(mi, sizeof mi, "%.9f", report.max_mi);
    if (report.pass) {
        out << "PASS max_mi_bits=" << mi << '\n';
        return exit_code::kOk;
    }
    out << "FAIL worst=[" << report.worst.describe() << "] mi_bits=" << mi << '\n';
    return exit_code::kPrivacyFail;
}

namespace {

std::vector<ClientDataset> read_datasets(const std::string& path, std::size_t n_clients, std::size_t d) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open data_file '" + path + "'");
    std::vector<ClientDataset> out(n_clients);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#' || view.starts_with("client")) continue;
        const auto parts = split(view, ',');
        if (parts.size() != d + 2) {
            throw ConfigError("data_file line " + std::to_string(line_no) + ": expected client,y and " +
                              std::to_string(d) + " features");
        }
        const auto client = parse_uint(parts[0], "client", line_no);
        if (client == 0 || client > n_clients) {
            throw ConfigError("data_file line " + std::to_string(line_no) + ": client out of range");
        }
        auto& data = out[client - 1];
        data.y.push_back(parse_double(parts[1], "y", line_no));
        std::vector<double> row;
        for (std::size_t j = 0; j < d; ++j) row.push_back(parse_double(parts[j + 2], "x", line_no));
        data.x.push_back(std::move(row));
    }
    return out;
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    const Topology t = topology_from_config(cfg);
    QuantizationConfig qcfg{FieldConfig(cfg.modulus()), cfg.scale, cfg.clip};
    std::vector<ClientDataset> datasets;
    if (!cfg.data_file.empty()) {
        datasets = read_datasets(cfg.data_file, t.n_clients(), cfg.d);
    } else {
        std::vector<double> w_true = cfg.w_true;
        if (w_true.empty()) {
            for (std::size_t j = 0; j < cfg.d; ++j) w_true.push_back(1.0 / static_cast<double>(j + 1));
        }
        if (w_true.size() != cfg.d) throw ConfigError("key 'w_true' must have d entries");
        datasets = synthetic_regression(t.n_clients(), cfg.samples, w_true, cfg.noise, cfg.seed);
    }
    LinearModel model0{cfg.w0.empty() ? std::vector<double>(cfg.d, 0.0) : cfg.w0, cfg.eta};
    if (model0.w.size() != cfg.d) throw ConfigError("key 'w0' must have d entries");

    const auto trajectory = train(t, datasets, model0, qcfg, cfg.iters, cfg.seed, Aggregation::Private);
    const std::string csv = trajectory_csv(trajectory);
    if (cfg.out.empty()) {
        out << csv;
    } else {
        write_file(cfg.out, csv);
    }
    char loss[40];
    std::snprintf(loss, sizeof loss, "%.17g", trajectory.back().loss);
    out << "final_loss=" << loss << '\n';
    if (cfg.compare_plaintext) {
        const auto plain = train(t, datasets, model0, qcfg, cfg.iters, cfg.seed, Aggregation::Plaintext);
        out << "private_vs_plaintext " << (trajectory_csv(plain) == csv ? "IDENTICAL" : "DIFFERENT") << '\n';
    }
    return exit_code::kOk;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        switch (cfg.command) {
            case Command::Simulate: return cmd_simulate(cfg, out);
            case Command::Sweep: return cmd_sweep(cfg, out);
            case Command::Audit: return cmd_audit(cfg, out);
            case Command::Train: return cmd_train(cfg, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const TopologyError& e) {
        err << "topology error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const FieldError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const CostError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return exit_code::kBudget;
    } catch (const AuditError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_code::kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::kInternal;
    }
    return exit_code::kInternal;
}

int run_cli(Command command, const std::string& config_path, bool broken, const std::string& out_path,
            std::ostream& out, std::ostream& err) {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
        err << "config error: cannot read config file '" << config_path << "'\n";
        return exit_code::kConfig;
    }
    std::stringstream buffer;
    buffer << f.rdbuf();
    RunConfig cfg;
    try {
        cfg = parse_config(buffer.str(), command);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_code::kConfig;
    }
    cfg.broken = broken;
    if (!out_path.empty()) cfg.out = out_path;
    // data_file is relative to the config file.
    if (!cfg.data_file.empty() && std::filesystem::path(cfg.data_file).is_relative()) {
        cfg.data_file = (std::filesystem::path(config_path).parent_path() / cfg.data_file).string();
    }
    return run_command(cfg, out, err);
}

}  // namespace hierfed
