#include "kddbench/mlp.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "kddbench/error.hpp"
#include "kddbench/rng.hpp"

namespace kdd {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void forward_into(const MlpModel& m, std::span<const double> input, std::vector<double>& hidden,
                  std::vector<double>& scores) {
    const auto& t = m.topology;
    if (input.size() != t.inputs) throw Error("input arity does not match the network");
    hidden.resize(t.hidden);
    scores.resize(t.outputs);
    const std::size_t in_stride = t.inputs + 1;
    for (std::uint32_t j = 0; j < t.hidden; ++j) {
        const double* w = &m.hidden_weights[j * in_stride];
        double net = w[t.inputs];  // bias
        for (std::uint32_t i = 0; i < t.inputs; ++i) net += w[i] * input[i];
        hidden[j] = sigmoid(net);
    }
    const std::size_t hid_stride = t.hidden + 1;
    for (std::uint32_t c = 0; c < t.outputs; ++c) {
        const double* w = &m.output_weights[c * hid_stride];
        double net = w[t.hidden];
        for (std::uint32_t j = 0; j < t.hidden; ++j) net += w[j] * hidden[j];
        scores[c] = activate(t.output_activation, net);
    }
}

}  // namespace

double activate(Activation kind, double x) {
    switch (kind) {
        case Activation::Linear:
            return x;
        case Activation::Sigmoid:
            return sigmoid(x);
        case Activation::Hyperbolic:
            return std::tanh(x);
        case Activation::HardLimit:
            return x >= 0 ? 1.0 : 0.0;
        case Activation::SymmetricHardLimit:
            return x >= 0 ? 1.0 : -1.0;
    }
    throw ConfigError("unknown activation");
}

MlpForward forward(const MlpModel& model, std::span<const double> input) {
    MlpForward out;
    forward_into(model, input, out.hidden, out.scores);
    out.probabilities.resize(out.scores.size());
    double sum = 0;
    for (std::size_t c = 0; c < out.scores.size(); ++c) {
        out.probabilities[c] = out.scores[c] > 0 ? out.scores[c] : 0.0;
        sum += out.probabilities[c];
    }
    if (sum > 0) {
        for (double& p : out.probabilities) p /= sum;
    } else {
        const double uniform = 1.0 / static_cast<double>(out.probabilities.size());
        for (double& p : out.probabilities) p = uniform;
    }
    return out;
}

double mean_squared_error(std::span<const std::vector<double>> predictions,
                          std::span<const std::vector<double>> targets) {
    if (predictions.size() != targets.size() || predictions.empty()) {
        throw Error("prediction/target counts differ or are empty");
    }
    double total = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].size() != targets[i].size()) {
            throw Error("prediction/target arity mismatch");
        }
        for (std::size_t c = 0; c < predictions[i].size(); ++c) {
            const double d = targets[i][c] - predictions[i][c];
            total += d * d;
        }
    }
    return total / static_cast<double>(predictions.size());
}

MlpGradients backprop_gradients(const MlpModel& model, std::span<const double> input,
                                std::span<const double> target) {
    const auto& t = model.topology;
    if (target.size() != t.outputs) throw Error("target arity does not match the network");
    std::vector<double> hidden, scores;
    forward_into(model, input, hidden, scores);

    MlpGradients g;
    g.hidden_weights.assign(model.hidden_weights.size(), 0.0);
    g.output_weights.assign(model.output_weights.size(), 0.0);

    const std::size_t hid_stride = t.hidden + 1;
    std::vector<double> delta_out(t.outputs);
    for (std::uint32_t c = 0; c < t.outputs; ++c) {
        const double dE = 2.0 * (scores[c] - target[c]);
        const double dAct = t.output_activation == Activation::Sigmoid
                                ? scores[c] * (1.0 - scores[c])
                                : 1.0;  // linear
        delta_out[c] = dE * dAct;
        double* gw = &g.output_weights[c * hid_stride];
        for (std::uint32_t j = 0; j < t.hidden; ++j) gw[j] = delta_out[c] * hidden[j];
        gw[t.hidden] = delta_out[c];
    }
    const std::size_t in_stride = t.inputs + 1;
    for (std::uint32_t j = 0; j < t.hidden; ++j) {
        double back = 0;
        for (std::uint32_t c = 0; c < t.outputs; ++c) {
            back += delta_out[c] * model.output_weights[c * hid_stride + j];
        }
        const double delta = back * hidden[j] * (1.0 - hidden[j]);
        double* gw = &g.hidden_weights[j * in_stride];
        for (std::uint32_t i = 0; i < t.inputs; ++i) gw[i] = delta * input[i];
        gw[t.inputs] = delta;
    }
    return g;
}

std::string epoch_log_to_csv(std::span<const EpochLog> log) {
    std::string out = "epoch,train_mse,validation_mse\n";
    char buf[32];
    auto append_double = [&](double v) {
        const auto rc = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, rc.ptr);
    };
    for (const auto& entry : log) {
        out += std::to_string(entry.epoch);
        out += ',';
        append_double(entry.train_mse);
        out += ',';
        if (!std::isnan(entry.validation_mse)) append_double(entry.validation_mse);
        out += '\n';
    }
    return out;
}

MlpModel train_mlp(const std::vector<std::vector<double>>& inputs,
                   const std::vector<std::int32_t>& classes, std::int32_t class_count,
                   const MlpTrainConfig& config, std::vector<EpochLog>* log) {
    if (inputs.empty()) throw Error("cannot train on an empty set");
    if (inputs.size() != classes.size()) throw Error("inputs/classes size mismatch");
    if (!(config.learning_rate > 0)) throw ConfigError("learning rate must be positive");
    if (!(config.momentum >= 0 && config.momentum < 1)) {
        throw ConfigError("momentum must be in [0, 1)");
    }
    if (config.validation_threshold < 1) throw ConfigError("validation threshold must be >= 1");
    if (!(config.validation_fraction >= 0 && config.validation_fraction < 1)) {
        throw ConfigError("validation fraction must be in [0, 1)");
    }
    if (config.output_activation != Activation::Sigmoid &&
        config.output_activation != Activation::Linear) {
        throw ConfigError("training supports sigmoid or linear output activation");
    }

    MlpModel model;
    model.topology.inputs = static_cast<std::uint32_t>(inputs[0].size());
    model.topology.outputs = static_cast<std::uint32_t>(class_count);
    model.topology.hidden =
        config.hidden_units != 0
            ? config.hidden_units
            : std::max<std::uint32_t>(
                  1, (model.topology.inputs + model.topology.outputs) / 2);
    model.topology.output_activation = config.output_activation;

    Rng rng(config.seed);
    model.hidden_weights.resize(static_cast<std::size_t>(model.topology.hidden) *
                                (model.topology.inputs + 1));
    model.output_weights.resize(static_cast<std::size_t>(model.topology.outputs) *
                                (model.topology.hidden + 1));
    for (double& w : model.hidden_weights) w = rng.uniform(-0.5, 0.5);
    for (double& w : model.output_weights) w = rng.uniform(-0.5, 0.5);

    std::vector<std::uint32_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0u);
    shuffle(std::span<std::uint32_t>(order), rng);

    // Validation split: the last fraction of the initial shuffle.
    std::size_t val_count = 0;
    if (config.validation_fraction > 0) {
        val_count = static_cast<std::size_t>(
            std::ceil(config.validation_fraction * static_cast<double>(inputs.size())));
        if (val_count >= inputs.size()) val_count = inputs.size() - 1;
    }
    std::vector<std::uint32_t> validation(order.end() - static_cast<std::ptrdiff_t>(val_count),
                                          order.end());
    order.resize(order.size() - val_count);

    std::vector<double> delta_hidden(model.hidden_weights.size(), 0.0);
    std::vector<double> delta_output(model.output_weights.size(), 0.0);
    std::vector<double> hidden, scores, target(static_cast<std::size_t>(class_count));
    std::vector<double> delta_out(model.topology.outputs);

    const std::size_t in_stride = model.topology.inputs + 1;
    const std::size_t hid_stride = model.topology.hidden + 1;
    double best_validation = std::numeric_limits<double>::infinity();
    std::uint32_t degradations = 0;

    auto validation_mse = [&]() {
        double total = 0;
        for (std::uint32_t idx : validation) {
            forward_into(model, inputs[idx], hidden, scores);
            for (std::uint32_t c = 0; c < model.topology.outputs; ++c) {
                const double t = classes[idx] == static_cast<std::int32_t>(c) ? 1.0 : 0.0;
                const double d = t - scores[c];
                total += d * d;
            }
        }
        return total / static_cast<double>(validation.size());
    };

    for (std::uint32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (epoch > 1) shuffle(std::span<std::uint32_t>(order), rng);
        double epoch_loss = 0;
        for (std::uint32_t idx : order) {
            const auto& x = inputs[idx];
            forward_into(model, x, hidden, scores);
            for (std::uint32_t c = 0; c < model.topology.outputs; ++c) {
                target[c] = classes[idx] == static_cast<std::int32_t>(c) ? 1.0 : 0.0;
                const double d = target[c] - scores[c];
                epoch_loss += d * d;
            }
            // fused backprop + momentum update
            for (std::uint32_t c = 0; c < model.topology.outputs; ++c) {
                const double dAct = model.topology.output_activation == Activation::Sigmoid
                                        ? scores[c] * (1.0 - scores[c])
                                        : 1.0;
                delta_out[c] = 2.0 * (scores[c] - target[c]) * dAct;
            }
            for (std::uint32_t j = 0; j < model.topology.hidden; ++j) {
                double back = 0;
                for (std::uint32_t c = 0; c < model.topology.outputs; ++c) {
                    back += delta_out[c] * model.output_weights[c * hid_stride + j];
                }
                const double delta = back * hidden[j] * (1.0 - hidden[j]);
                double* w = &model.hidden_weights[j * in_stride];
                double* dw = &delta_hidden[j * in_stride];
                for (std::uint32_t i = 0; i < model.topology.inputs; ++i) {
                    dw[i] = -config.learning_rate * delta * x[i] + config.momentum * dw[i];
                    w[i] += dw[i];
                }
                dw[model.topology.inputs] =
                    -config.learning_rate * delta + config.momentum * dw[model.topology.inputs];
                w[model.topology.inputs] += dw[model.topology.inputs];
            }
            for (std::uint32_t c = 0; c < model.topology.outputs; ++c) {
                double* w = &model.output_weights[c * hid_stride];
                double* dw = &delta_output[c * hid_stride];
                for (std::uint32_t j = 0; j < model.topology.hidden; ++j) {
                    dw[j] = -config.learning_rate * delta_out[c] * hidden[j] +
                            config.momentum * dw[j];
                    w[j] += dw[j];
                }
                dw[model.topology.hidden] =
                    -config.learning_rate * delta_out[c] +
                    config.momentum * dw[model.topology.hidden];
                w[model.topology.hidden] += dw[model.topology.hidden];
            }
        }
        const double train_mse = epoch_loss / static_cast<double>(order.size());
        if (!std::isfinite(train_mse)) {
            throw TrainingError("training diverged at epoch " + std::to_string(epoch));
        }
        double val_mse = std::numeric_limits<double>::quiet_NaN();
        if (!validation.empty()) val_mse = validation_mse();
        if (log != nullptr) log->push_back({epoch, train_mse, val_mse});
        if (!validation.empty()) {
            if (val_mse < best_validation) {
                best_validation = val_mse;
                degradations = 0;
            } else {
                ++degradations;
                if (degradations >= config.validation_threshold) break;
            }
        }
    }
    return model;
}

}  // namespace kdd
