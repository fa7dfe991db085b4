#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hierfed/cli.hpp"
#include "hierfed/cost.hpp"
#include "hierfed/learning.hpp"
#include "hierfed/privacy.hpp"
#include "hierfed/protocol.hpp"

namespace py = pybind11;
using namespace hierfed;

namespace {

std::vector<FieldVector> to_field(const std::vector<std::vector<std::uint64_t>>& rows, const FieldConfig& field) {
    std::vector<FieldVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.emplace_back(field, r);
    return out;
}

std::vector<std::uint64_t> to_list(std::span<const std::uint64_t> v) { return {v.begin(), v.end()}; }

py::dict cost_dict(const CostReport& c) {
    py::dict d;
    d["c_ue"] = c.c_ue;
    d["c_bs"] = c.c_bs;
    d["c_bsf"] = c.c_bsf;
    d["c_total"] = c.c_total;
    d["predicted_c_ue"] = c.predicted_c_ue;
    d["predicted_c_bs"] = c.predicted_c_bs;
    d["predicted_c_bsf"] = c.predicted_c_bsf;
    d["matches_prediction"] = c.matches_prediction();
    d["c_min"] = to_decimal(c.c_min);
    d["beta"] = to_decimal(c.beta);
    d["ratio_bound"] = to_decimal(c.ratio_bound);
    d["loose_lower"] = to_decimal(c.loose_lower);
    d["loose_upper"] = to_decimal(c.loose_upper);
    return d;
}

GradientPrior make_prior(const std::string& name, const std::vector<std::uint64_t>& point, std::size_t n, std::size_t d,
                         const FieldConfig& field) {
    if (name == "uniform") return GradientPrior::uniform(n, d, field);
    if (name == "point") return GradientPrior::point_mass(point, n, d, field);
    if (name == "all_equal") return GradientPrior::all_equal(n, d, field);
    throw py::value_error("prior must be uniform, point or all_equal");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hierarchical private aggregation: protocol, costs, privacy audit, training.";

    py::register_exception<TopologyError>(m, "TopologyError", PyExc_ValueError);
    py::register_exception<FieldError>(m, "FieldError", PyExc_ValueError);
    py::register_exception<CostError>(m, "CostError", PyExc_ValueError);
    auto audit_error = py::register_exception<AuditError>(m, "AuditError", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", audit_error.ptr());
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.attr("MERSENNE31") = FieldConfig::kMersenne31;
    m.attr("MERSENNE61") = FieldConfig::kMersenne61;
    m.def("is_prime", &is_prime, py::arg("n"));

    py::class_<Topology>(m, "Topology")
        .def(py::init([](std::size_t n_bs, std::vector<StationSet> gamma, std::vector<std::size_t> main_bs,
                         std::size_t z_bs, std::size_t z_ue) {
                 const std::size_t n = gamma.size();
                 return build_topology(n, n_bs, std::move(gamma), std::move(main_bs), {z_ue, z_bs});
             }),
             py::arg("n_bs"), py::arg("gamma"), py::arg("main_bs"), py::arg("z_bs") = 0, py::arg("z_ue") = 0,
             "0-based station indices.")
        .def_static("random", &random_topology, py::arg("n_clients"), py::arg("n_bs"), py::arg("z_bs"),
                    py::arg("nu"), py::arg("seed"), py::arg("z_ue") = 0)
        .def_static("random_mixed", &random_mixed_topology, py::arg("n_clients"), py::arg("n_bs"), py::arg("z_bs"),
                    py::arg("seed"), py::arg("z_ue") = 0)
        .def_property_readonly("n_clients", &Topology::n_clients)
        .def_property_readonly("n_bs", &Topology::n_bs)
        .def_property_readonly("z_bs", &Topology::z_bs)
        .def_property_readonly("z_ue", [](const Topology& t) { return t.privacy().z_ue; })
        .def("gamma", &Topology::gamma, py::arg("client"))
        .def("main_bs", &Topology::main_bs, py::arg("client"))
        .def("nu", &Topology::nu, py::arg("client"))
        .def("cluster", &Topology::cluster, py::arg("bs"))
        .def("patterns",
             [](const Topology& t) {
                 std::vector<std::pair<StationSet, std::vector<std::size_t>>> out;
                 for (auto& p : group_by_pattern(t)) out.emplace_back(p.pattern, p.members);
                 return out;
             })
        .def("__eq__", [](const Topology& a, const Topology& b) { return a == b; })
        .def("__repr__", [](const Topology& t) {
            return "Topology(gamma=\"" + t.gamma_string() + "\", main_bs=\"" + t.main_bs_string() + "\")";
        });

    m.def(
        "run_round",
        [](const Topology& t, const std::vector<std::vector<std::uint64_t>>& gradients, std::uint64_t q,
           std::uint64_t seed, bool broken) {
            const FieldConfig field(q);
            const auto g = to_field(gradients, field);
            auto r = broken ? run_round_broken_no_masks(t, g, field, seed) : run_round(t, g, field, seed);
            py::dict d;
            d["aggregate"] = to_list(r.aggregate.raw());
            d["key_sum"] = to_list(r.key_sum.raw());
            d["messages"] = r.log.messages().size();
            d["log"] = r.log.export_text();
            d["replayed"] = to_list(replay(r.log).aggregate.raw());
            d["cost"] = cost_dict(measure(r.log, t));
            return d;
        },
        py::arg("topology"), py::arg("gradients"), py::arg("q") = FieldConfig::kMersenne31, py::arg("seed") = 0,
        py::arg("broken") = false,
        "One aggregation round. Returns the decoded sum, the message log and the cost report.");

    m.def(
        "predict_costs",
        [](const Topology& t, std::size_t d) {
            py::dict out;
            out["c_ue"] = predict_c_ue(t, d);
            out["c_bs"] = predict_c_bs(t, d);
            out["c_bsf"] = predict_c_bsf(t, d);
            out["c_min"] = to_decimal(predict_c_min(t, d));
            return out;
        },
        py::arg("topology"), py::arg("d"));

    m.def(
        "sweep",
        [](std::size_t n, std::size_t b, std::size_t z, std::size_t d, std::size_t lo, std::size_t hi) {
            return sweep_csv(sweep_costs(n, b, z, d, lo, hi));
        },
        py::arg("n_clients"), py::arg("n_bs"), py::arg("z_bs"), py::arg("d"), py::arg("nu_lo"), py::arg("nu_hi"),
        "Normalised cost curves as CSV text.");

    m.def(
        "audit",
        [](const Topology& t, std::uint64_t q, std::size_t d, const std::string& prior,
           const std::vector<std::uint64_t>& point, bool broken, std::uint64_t budget) {
            const FieldConfig field(q);
            const auto rep = audit_matrix(t, field, d, make_prior(prior, point, t.n_clients(), d, field),
                                          broken ? SchemeVariant::NoMasks : SchemeVariant::Honest, budget);
            py::list lines;
            for (const auto& l : rep.lines) {
                lines.append(py::make_tuple(l.case_label, l.adversary.describe(), l.mi_bits, l.pass));
            }
            py::dict out;
            out["pass"] = rep.pass;
            out["max_mi_bits"] = rep.max_mi;
            out["worst"] = rep.worst.describe();
            out["lines"] = lines;
            out["text"] = rep.to_text();
            return out;
        },
        py::arg("topology"), py::arg("q"), py::arg("d") = 1, py::arg("prior") = "uniform",
        py::arg("point") = std::vector<std::uint64_t>{}, py::arg("broken") = false,
        py::arg("budget") = kDefaultAuditBudget, "Exhaustive mutual-information audit over every coalition.");

    m.def(
        "train",
        [](const Topology& t, const std::vector<std::vector<std::vector<double>>>& x,
           const std::vector<std::vector<double>>& y, std::vector<double> w0, double eta, std::size_t iters,
           std::uint64_t seed, bool private_aggregation, double scale, double clip) {
            if (x.size() != y.size()) throw py::value_error("x and y need one entry per client");
            std::vector<ClientDataset> data;
            for (std::size_t i = 0; i < x.size(); ++i) data.push_back({x[i], y[i]});
            QuantizationConfig cfg;
            cfg.scale = scale;
            cfg.clip = clip;
            const auto traj = train(t, data, LinearModel{std::move(w0), eta}, cfg, iters, seed,
                                    private_aggregation ? Aggregation::Private : Aggregation::Plaintext);
            std::vector<std::tuple<std::size_t, double, std::vector<double>>> out;
            for (const auto& p : traj) out.emplace_back(p.iter, p.loss, p.w);
            return out;
        },
        py::arg("topology"), py::arg("x"), py::arg("y"), py::arg("w0"), py::arg("eta") = 0.1,
        py::arg("iters") = 20, py::arg("seed") = 0, py::arg("private") = true, py::arg("scale") = 65536.0,
        py::arg("clip") = 1.0e6, "Gradient descent on least squares. Returns (iter, loss, w) rows.");

    m.def(
        "run_cli",
        [](const std::string& command, const std::string& config, bool broken, const std::string& out_path) {
            std::ostringstream out, err;
            const int code = run_cli(parse_command(command), config, broken, out_path, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("config"), py::arg("broken") = false, py::arg("out") = "",
        "Same as the command-line tool. Returns (exit_code, stdout, stderr).");
}
