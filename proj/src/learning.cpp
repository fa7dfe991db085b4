#include "hierfed/learning.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "hierfed/protocol.hpp"

namespace hierfed {

void QuantizationConfig::validate_for(std::size_t n_summands) const {
    if (!(clip > 0) || !(scale > 0)) throw NumericError("quantization needs clip > 0 and scale > 0");
    const long double half = (static_cast<long double>(field.modulus()) - 1) / 2;
    const long double reach = static_cast<long double>(n_summands) * scale * clip;
    if (!(reach < half)) {
        throw NumericError("quantization headroom: N * scale * clip = " + std::to_string(static_cast<double>(reach)) +
                           " must stay below (q - 1) / 2");
    }
}

FieldVector quantize(const std::vector<double>& v, const QuantizationConfig& cfg) {
    FieldVector out(cfg.field, 0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (!std::isfinite(v[j]) || std::fabs(v[j]) > cfg.clip) {
            throw NumericError("quantize: entry " + std::to_string(j) + " = " + std::to_string(v[j]) +
                               " exceeds clip " + std::to_string(cfg.clip));
        }
        const auto fixed = static_cast<std::int64_t>(std::llround(v[j] * cfg.scale));
        out.push_back(FieldElement::from_signed(fixed, cfg.field));
    }
    return out;
}

std::vector<double> dequantize(const FieldVector& v, std::size_t n_summands, const QuantizationConfig& cfg) {
    if (v.modulus() != cfg.field.modulus()) throw NumericError("dequantize: field mismatch");
    const std::uint64_t q = cfg.field.modulus();
    const long double limit = static_cast<long double>(n_summands) * cfg.scale * cfg.clip;
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const std::uint64_t raw = v.raw()[j];
        // (-q/2, q/2]: q odd, so values above (q-1)/2 are negative.
        const std::int64_t lifted = raw <= (q - 1) / 2 ? static_cast<std::int64_t>(raw)
                                                       : -static_cast<std::int64_t>(q - raw);
        if (std::fabs(static_cast<long double>(lifted)) > limit) {
            throw NumericError("dequantize: entry " + std::to_string(j) + " lifts to " + std::to_string(lifted) +
                               ", outside the range of " + std::to_string(n_summands) +
                               " summands (wraparound)");
        }
        out.push_back(static_cast<double>(lifted) / cfg.scale);
    }
    return out;
}

void ClientDataset::validate(std::size_t d) const {
    if (y.empty()) throw NumericError("client dataset needs at least one sample");
    if (x.size() != y.size()) throw NumericError("client dataset has mismatched X and y");
    for (const auto& row : x) {
        if (row.size() != d) {
            throw NumericError("sample of dimension " + std::to_string(row.size()) + " but model has " +
                               std::to_string(d));
        }
    }
}

std::vector<double> local_gradient(const LinearModel& model, const ClientDataset& data) {
    const std::size_t d = model.w.size();
    data.validate(d);
    std::vector<double> grad(d, 0.0);
    for (std::size_t s = 0; s < data.samples(); ++s) {
        double residual = -data.y[s];
        for (std::size_t j = 0; j < d; ++j) residual += data.x[s][j] * model.w[j];
        for (std::size_t j = 0; j < d; ++j) grad[j] += data.x[s][j] * residual;
    }
    return grad;
}

double squared_loss(const std::vector<double>& w, const std::vector<ClientDataset>& datasets) {
    double loss = 0.0;
    for (const auto& data : datasets) {
        for (std::size_t s = 0; s < data.samples(); ++s) {
            double residual = -data.y[s];
            for (std::size_t j = 0; j < w.size(); ++j) residual += data.x[s][j] * w[j];
            loss += 0.5 * residual * residual;
        }
    }
    return loss;
}

std::vector<TrajectoryPoint> train(const Topology& t, const std::vector<ClientDataset>& datasets,
                                   const LinearModel& model0, const QuantizationConfig& cfg, std::size_t iters,
                                   std::uint64_t seed, Aggregation aggregation) {
    if (datasets.size() != t.n_clients()) {
        throw NumericError("topology has " + std::to_string(t.n_clients()) + " clients but " +
                           std::to_string(datasets.size()) + " datasets were given");
    }
    const std::size_t d = model0.w.size();
    if (d == 0) throw NumericError("model has no parameters");
    std::size_t total_samples = 0;
    for (const auto& data : datasets) {
        data.validate(d);
        total_samples += data.samples();
    }
    cfg.validate_for(t.n_clients());

    LinearModel model = model0;
    std::vector<TrajectoryPoint> trajectory{{0, squared_loss(model.w, datasets), model.w}};
    // One round seed per iteration, derived from the run seed.
    std::mt19937_64 seeder(seed);
    const double step = model.eta / static_cast<double>(total_samples);
    for (std::size_t it = 1; it <= iters; ++it) {
        const std::uint64_t round_seed = seeder();
        std::vector<FieldVector> quantized;
        quantized.reserve(datasets.size());
        for (const auto& data : datasets) quantized.push_back(quantize(local_gradient(model, data), cfg));

        FieldVector sum(cfg.field, d);
        if (aggregation == Aggregation::Private) {
            sum = run_round(t, quantized, cfg.field, round_seed).aggregate;
        } else {
            for (const auto& g : quantized) sum += g;
        }
        const std::vector<double> grad = dequantize(sum, t.n_clients(), cfg);
        for (std::size_t j = 0; j < d; ++j) model.w[j] -= step * grad[j];
        trajectory.push_back({it, squared_loss(model.w, datasets), model.w});
    }
    return trajectory;
}

std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
    std::ostringstream os;
    os << "iter,loss";
    const std::size_t d = trajectory.empty() ? 0 : trajectory.front().w.size();
    for (std::size_t j = 0; j < d; ++j) os << ",w_" << j;
    os << '\n';
    char buf[40];
    for (const auto& p : trajectory) {
        os << p.iter;
        // %.17g round-trips doubles exactly.
        std::snprintf(buf, sizeof buf, "%.17g", p.loss);
        os << ',' << buf;
        for (double w : p.w) {
            std::snprintf(buf, sizeof buf, "%.17g", w);
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<ClientDataset> synthetic_regression(std::size_t n_clients, std::size_t samples_per_client,
                                                const std::vector<double>& w_true, double noise, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    // Map raw 64-bit draws to doubles by hand; std distributions are not
    // bit-identical across standard libraries.
    const auto unit = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
    std::vector<ClientDataset> out(n_clients);
    for (auto& data : out) {
        for (std::size_t s = 0; s < samples_per_client; ++s) {
            std::vector<double> row(w_true.size());
            double label = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                row[j] = 2.0 * unit() - 1.0;
                label += row[j] * w_true[j];
            }
            label += noise * (2.0 * unit() - 1.0);
            data.x.push_back(std::move(row));
            data.y.push_back(label);
        }
    }
    return out;
}

}  // namespace hierfed
