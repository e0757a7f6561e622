#pragma once

// Single-hidden-layer perceptron: sigmoid hidden units, per-class sigmoid
// (or linear) outputs trained against one-hot targets by stochastic
// back-propagation with momentum. Bias terms ride along as a constant-1
// input on each layer.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kdd {

enum class Activation : std::uint8_t {
    Linear,
    Sigmoid,
    Hyperbolic,  // tanh
    HardLimit,
    SymmetricHardLimit,
};

double activate(Activation kind, double x);

struct MlpTopology {
    std::uint32_t inputs = 0;
    std::uint32_t hidden = 0;
    std::uint32_t outputs = 0;
    Activation output_activation = Activation::Sigmoid;
};

struct MlpModel {
    MlpTopology topology;
    // Row-major, bias as the trailing column of each row.
    std::vector<double> hidden_weights;  // hidden x (inputs + 1)
    std::vector<double> output_weights;  // outputs x (hidden + 1)
};

struct MlpForward {
    std::vector<double> hidden;         // post-sigmoid hidden outputs
    std::vector<double> scores;         // per-class output activations
    std::vector<double> probabilities;  // scores normalized to sum 1
};

// Probabilities are the scores normalized by their sum (uniform when the sum
// is zero); negative linear scores clamp to zero first so the result is
// always a valid probability vector.
MlpForward forward(const MlpModel& model, std::span<const double> input);

// (1/N) * sum over instances of the summed squared per-output error.
double mean_squared_error(std::span<const std::vector<double>> predictions,
                          std::span<const std::vector<double>> targets);

struct MlpGradients {
    std::vector<double> hidden_weights;
    std::vector<double> output_weights;
};

// Analytic gradient of one instance's summed squared error; checked against
// central finite differences in the test suite.
MlpGradients backprop_gradients(const MlpModel& model, std::span<const double> input,
                                std::span<const double> target);

struct MlpTrainConfig {
    double learning_rate = 0.3;
    double momentum = 0.2;
    std::uint32_t validation_threshold = 20;  // consecutive degradations that stop training
    double validation_fraction = 0.0;         // 0 disables early stopping
    std::uint32_t max_epochs = 500;
    std::uint32_t hidden_units = 0;  // 0 selects floor((inputs + classes) / 2)
    Activation output_activation = Activation::Sigmoid;
    std::uint64_t seed = 1;
};

struct EpochLog {
    std::uint32_t epoch = 0;
    double train_mse = 0;
    double validation_mse = 0;  // NaN when no validation split
};

// Training-log CSV `epoch,train_mse,validation_mse` (blank last field when
// there is no validation split).
std::string epoch_log_to_csv(std::span<const EpochLog> log);

// Weights start uniform in [-0.5, 0.5) from the seed; instance order is
// reshuffled every epoch; updates are per-instance with momentum. Train MSE
// in the log accumulates each instance's pre-update loss over the epoch.
MlpModel train_mlp(const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::int32_t>& classes, std::int32_t class_count,
                   const MlpTrainConfig& config, std::vector<EpochLog>* log = nullptr);

}  // namespace kdd
