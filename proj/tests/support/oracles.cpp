#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace kdd::testsupport {

double oracle_accuracy(const ConfusionMatrix& cm) {
    long double correct = 0;
    long double total = 0;
    for (std::int32_t i = 0; i < cm.class_count; ++i) {
        for (std::int32_t j = 0; j < cm.class_count; ++j) {
            total += cm.at(i, j);
            if (i == j) correct += cm.at(i, j);
        }
    }
    return static_cast<double>(correct / total);
}

double oracle_kappa(const ConfusionMatrix& cm) {
    long double total = 0;
    for (std::uint64_t c : cm.cells) total += c;
    long double po = 0;
    for (std::int32_t i = 0; i < cm.class_count; ++i) po += cm.at(i, i);
    po /= total;
    long double pe = 0;
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        long double row = 0;
        long double col = 0;
        for (std::int32_t k = 0; k < cm.class_count; ++k) {
            row += cm.at(c, k);
            col += cm.at(k, c);
        }
        pe += (row / total) * (col / total);
    }
    return static_cast<double>((po - pe) / (1.0L - pe));
}

std::pair<double, double> oracle_mae_rmse(std::span<const ScoredPrediction> scores) {
    long double abs_acc = 0;
    long double sq_acc = 0;
    for (const auto& s : scores) {
        long double a = 0;
        long double q = 0;
        for (std::size_t c = 0; c < s.probabilities.size(); ++c) {
            const long double truth = static_cast<std::size_t>(s.true_class) == c ? 1.0L : 0.0L;
            const long double d = std::fabs(static_cast<long double>(s.probabilities[c]) - truth);
            a += d;
            q += d * d;
        }
        abs_acc += a / static_cast<long double>(s.probabilities.size());
        sq_acc += q / static_cast<long double>(s.probabilities.size());
    }
    const long double n = static_cast<long double>(scores.size());
    return {static_cast<double>(abs_acc / n),
            static_cast<double>(std::sqrt(static_cast<double>(sq_acc / n)))};
}

std::vector<ClassRates> oracle_per_class_rates(const ConfusionMatrix& cm) {
    std::vector<ClassRates> rates(static_cast<std::size_t>(cm.class_count));
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        long double tp = cm.at(c, c);
        long double row = 0;
        long double col = 0;
        long double total = 0;
        for (std::int32_t i = 0; i < cm.class_count; ++i) {
            row += cm.at(c, i);
            col += cm.at(i, c);
        }
        for (std::uint64_t cell : cm.cells) total += cell;
        auto& r = rates[static_cast<std::size_t>(c)];
        if (row > 0) {
            r.tp_rate = static_cast<double>(tp / row);
        } else {
            r.tp_rate_defined = false;
        }
        if (col > 0) {
            r.precision = static_cast<double>(tp / col);
        } else {
            r.precision_defined = false;
        }
        if (total - row > 0) {
            r.fp_rate = static_cast<double>((col - tp) / (total - row));
        } else {
            r.fp_rate_defined = false;
        }
    }
    return rates;
}

double oracle_roc_auc(std::span<const ScoredPrediction> scores, std::int32_t c) {
    long double wins = 0;
    std::uint64_t pairs = 0;
    for (const auto& pos : scores) {
        if (pos.true_class != c) continue;
        for (const auto& neg : scores) {
            if (neg.true_class == c) continue;
            ++pairs;
            const double sp = pos.probabilities[static_cast<std::size_t>(c)];
            const double sn = neg.probabilities[static_cast<std::size_t>(c)];
            if (sp > sn) {
                wins += 1;
            } else if (sp == sn) {
                wins += 0.5L;
            }
        }
    }
    return static_cast<double>(wins / static_cast<long double>(pairs));
}

double oracle_weighted_average(std::span<const double> values, const ConfusionMatrix& cm) {
    long double num = 0;
    long double den = 0;
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        long double row = 0;
        for (std::int32_t j = 0; j < cm.class_count; ++j) row += cm.at(c, j);
        num += row * values[static_cast<std::size_t>(c)];
        den += row;
    }
    return static_cast<double>(num / den);
}

namespace {

double plain_entropy(const std::vector<std::uint64_t>& counts) {
    double total = 0;
    for (std::uint64_t c : counts) total += static_cast<double>(c);
    double h = 0;
    for (std::uint64_t c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double split_gain(const std::vector<std::uint64_t>& parent,
                  const std::vector<std::vector<std::uint64_t>>& children, double* split_info) {
    double parent_total = 0;
    for (std::uint64_t c : parent) parent_total += static_cast<double>(c);
    double weighted = 0;
    double info = 0;
    for (const auto& child : children) {
        double t = 0;
        for (std::uint64_t c : child) t += static_cast<double>(c);
        if (t == 0) continue;
        weighted += t / parent_total * plain_entropy(child);
        info -= t / parent_total * std::log2(t / parent_total);
    }
    if (split_info != nullptr) *split_info = info;
    return plain_entropy(parent) - weighted;
}

}  // namespace

OracleSplit oracle_best_split(const DataTable& data, std::uint32_t min_leaf, bool gain_ratio) {
    OracleSplit best;
    const std::size_t C = static_cast<std::size_t>(data.class_count());
    std::vector<std::uint64_t> parent(C, 0);
    for (std::int32_t y : data.classes()) ++parent[static_cast<std::size_t>(y)];

    for (std::size_t f = 0; f < data.layout().feature_count(); ++f) {
        if (data.layout().kinds[f] == ColumnKind::Numeric) {
            const auto& col = data.numeric_column(data.layout().slots[f]);
            std::vector<double> distinct(col.begin(), col.end());
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            for (std::size_t i = 1; i < distinct.size(); ++i) {
                double threshold = distinct[i - 1] + (distinct[i] - distinct[i - 1]) / 2;
                if (!(threshold < distinct[i])) threshold = distinct[i - 1];
                std::vector<std::vector<std::uint64_t>> children(2,
                                                                 std::vector<std::uint64_t>(C, 0));
                for (std::size_t r = 0; r < data.rows(); ++r) {
                    ++children[col[r] <= threshold ? 0 : 1]
                              [static_cast<std::size_t>(data.classes()[r])];
                }
                std::uint64_t left = 0;
                std::uint64_t right = 0;
                for (std::size_t c = 0; c < C; ++c) {
                    left += children[0][c];
                    right += children[1][c];
                }
                if (left < min_leaf || right < min_leaf) continue;
                double info = 0;
                const double gain = split_gain(parent, children, &info);
                if (gain < 1e-12) continue;
                const double criterion = gain_ratio ? gain / info : gain;
                if (!best.valid || criterion > best.criterion) {
                    best = {true, static_cast<std::int32_t>(f), threshold, criterion};
                }
            }
        } else {
            const std::size_t slot = data.layout().slots[f];
            const auto arity = static_cast<std::size_t>(data.layout().nominal_arity[slot]);
            std::vector<std::vector<std::uint64_t>> children(arity,
                                                             std::vector<std::uint64_t>(C, 0));
            const auto& col = data.nominal_column(slot);
            for (std::size_t r = 0; r < data.rows(); ++r) {
                ++children[static_cast<std::size_t>(col[r])]
                          [static_cast<std::size_t>(data.classes()[r])];
            }
            std::uint32_t populated = 0;
            for (const auto& child : children) {
                std::uint64_t t = 0;
                for (std::uint64_t c : child) t += c;
                if (t >= min_leaf) ++populated;
            }
            if (populated < 2) continue;
            double info = 0;
            const double gain = split_gain(parent, children, &info);
            if (gain < 1e-12) continue;
            const double criterion = gain_ratio ? gain / info : gain;
            if (!best.valid || criterion > best.criterion) {
                best = {true, static_cast<std::int32_t>(f), 0.0, criterion};
            }
        }
    }
    return best;
}

std::vector<double> oracle_nb_posterior(const DataTable& train, double alpha,
                                        std::span<const std::int32_t> nominal_instance) {
    const std::size_t C = static_cast<std::size_t>(train.class_count());
    const std::size_t F = train.layout().nominal_count();
    std::vector<std::uint64_t> class_counts(C, 0);
    for (std::int32_t y : train.classes()) ++class_counts[static_cast<std::size_t>(y)];

    // joint under independence: p(x, y) = p(y) * prod_f p(x_f | y), all as
    // plain double products
    std::vector<double> joint(C, 0.0);
    for (std::size_t y = 0; y < C; ++y) {
        double p = static_cast<double>(class_counts[y]) / static_cast<double>(train.rows());
        for (std::size_t s = 0; s < F; ++s) {
            const auto arity = static_cast<std::size_t>(train.layout().nominal_arity[s]);
            std::uint64_t matches = 0;
            const auto& col = train.nominal_column(s);
            for (std::size_t r = 0; r < train.rows(); ++r) {
                if (train.classes()[r] == static_cast<std::int32_t>(y) &&
                    col[r] == nominal_instance[s]) {
                    ++matches;
                }
            }
            p *= (static_cast<double>(matches) + alpha) /
                 (static_cast<double>(class_counts[y]) + alpha * static_cast<double>(arity));
        }
        joint[y] = p;
    }
    double total = 0;
    for (double p : joint) total += p;
    for (double& p : joint) p /= total;
    return joint;
}

MlpGradients oracle_fd_gradients(const MlpModel& model, std::span<const double> input,
                                 std::span<const double> target, double h) {
    auto loss = [&](const MlpModel& m) {
        const auto out = forward(m, input);
        double e = 0;
        for (std::size_t c = 0; c < target.size(); ++c) {
            const double d = target[c] - out.scores[c];
            e += d * d;
        }
        return e;
    };
    MlpGradients g;
    g.hidden_weights.resize(model.hidden_weights.size());
    g.output_weights.resize(model.output_weights.size());
    MlpModel probe = model;
    for (std::size_t i = 0; i < probe.hidden_weights.size(); ++i) {
        const double keep = probe.hidden_weights[i];
        probe.hidden_weights[i] = keep + h;
        const double up = loss(probe);
        probe.hidden_weights[i] = keep - h;
        const double down = loss(probe);
        probe.hidden_weights[i] = keep;
        g.hidden_weights[i] = (up - down) / (2 * h);
    }
    for (std::size_t i = 0; i < probe.output_weights.size(); ++i) {
        const double keep = probe.output_weights[i];
        probe.output_weights[i] = keep + h;
        const double up = loss(probe);
        probe.output_weights[i] = keep - h;
        const double down = loss(probe);
        probe.output_weights[i] = keep;
        g.output_weights[i] = (up - down) / (2 * h);
    }
    return g;
}

}  // namespace kdd::testsupport
