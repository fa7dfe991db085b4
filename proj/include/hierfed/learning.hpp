#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierfed/field.hpp"
#include "hierfed/topology.hpp"

namespace hierfed {

/// Quantisation or dequantisation would leave the representable range.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed-point map R -> F_q: x -> round(x * scale), negatives as q - |.|.
struct QuantizationConfig {
    FieldConfig field{FieldConfig::kMersenne61};
    double scale = 65536.0;  ///< 2^16
    double clip = 1.0e6;

    /// N * scale * clip < (q - 1) / 2, so a sum of N values cannot wrap.
    void validate_for(std::size_t n_summands) const;
};

FieldVector quantize(const std::vector<double>& v, const QuantizationConfig& cfg);

/// Centered lift into (-q/2, q/2], divided by scale. Throws if an entry lies
/// outside +-n_summands * scale * clip (the sum wrapped around).
std::vector<double> dequantize(const FieldVector& v, std::size_t n_summands, const QuantizationConfig& cfg);

struct LinearModel {
    std::vector<double> w;
    double eta = 0.01;
};

struct ClientDataset {
    std::vector<std::vector<double>> x;  ///< m_i rows of length d
    std::vector<double> y;

    std::size_t samples() const { return y.size(); }
    void validate(std::size_t d) const;
};

/// Gradient of sum_s 1/2 (x_s . w - y_s)^2: sum_s x_s^T (x_s . w - y_s).
std::vector<double> local_gradient(const LinearModel& model, const ClientDataset& data);

/// sum over all clients and samples of 1/2 (x_s . w - y_s)^2
double squared_loss(const std::vector<double>& w, const std::vector<ClientDataset>& datasets);

enum class Aggregation {
    Private,    ///< sum computed by the two-phase protocol
    Plaintext,  ///< field sum of the quantised gradients, no protocol
};

struct TrajectoryPoint {
    std::size_t iter;
    double loss;
    std::vector<double> w;
};

/// Full-batch gradient descent with step eta / M, M = total samples. Row 0
/// holds the initial model.
std::vector<TrajectoryPoint> train(const Topology& t, const std::vector<ClientDataset>& datasets,
                                   const LinearModel& model0, const QuantizationConfig& cfg, std::size_t iters,
                                   std::uint64_t seed, Aggregation aggregation = Aggregation::Private);

/// `iter,loss,w_0,...,w_{d-1}`
std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory);

/// Synthetic least-squares data: y = x . w_true + noise, features uniform in
/// [-1, 1].
std::vector<ClientDataset> synthetic_regression(std::size_t n_clients, std::size_t samples_per_client,
                                                const std::vector<double>& w_true, double noise, std::uint64_t seed);

}  // namespace hierfed
