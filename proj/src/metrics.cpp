#include "kddbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "kddbench/error.hpp"

namespace kdd {

std::uint64_t ConfusionMatrix::row_sum(std::int32_t t) const {
    std::uint64_t sum = 0;
    for (std::int32_t p = 0; p < class_count; ++p) sum += at(t, p);
    return sum;
}

std::uint64_t ConfusionMatrix::col_sum(std::int32_t p) const {
    std::uint64_t sum = 0;
    for (std::int32_t t = 0; t < class_count; ++t) sum += at(t, p);
    return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t sum = 0;
    for (std::int32_t c = 0; c < class_count; ++c) sum += at(c, c);
    return sum;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.class_count != class_count) throw MetricError("matrix arity mismatch in merge");
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] += other.cells[i];
    total += other.total;
}

std::int32_t argmax_lowest(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return static_cast<std::int32_t>(best);
}

void EvaluationAccumulator::add(ScoredPrediction prediction) {
    if (prediction.probabilities.size() !=
        static_cast<std::size_t>(matrix_.class_count)) {
        throw MetricError("prediction arity drifted mid-stream");
    }
    const std::int32_t predicted = argmax_lowest(prediction.probabilities);
    matrix_.add(prediction.true_class, predicted);
    scores_.push_back(std::move(prediction));
}

void EvaluationAccumulator::merge(EvaluationAccumulator&& other) {
    matrix_.merge(other.matrix_);
    scores_.insert(scores_.end(), std::make_move_iterator(other.scores_.begin()),
                   std::make_move_iterator(other.scores_.end()));
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total == 0) throw MetricError("accuracy of an empty matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total);
}

double kappa(const ConfusionMatrix& cm) {
    if (cm.total == 0) throw MetricError("kappa of an empty matrix");
    const double total = static_cast<double>(cm.total);
    const double p_o = static_cast<double>(cm.trace()) / total;
    double p_e = 0;
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        p_e += static_cast<double>(cm.row_sum(c)) * static_cast<double>(cm.col_sum(c));
    }
    p_e /= total * total;
    if (p_e == 1.0) throw MetricError("kappa undefined: chance agreement is 1");
    return (p_o - p_e) / (1.0 - p_e);
}

std::pair<double, double> mae_rmse(std::span<const ScoredPrediction> scores) {
    if (scores.empty()) throw MetricError("MAE/RMSE of an empty score set");
    double abs_total = 0;
    double sq_total = 0;
    for (const auto& s : scores) {
        const double C = static_cast<double>(s.probabilities.size());
        double abs_sum = 0;
        double sq_sum = 0;
        for (std::size_t c = 0; c < s.probabilities.size(); ++c) {
            const double truth = static_cast<std::size_t>(s.true_class) == c ? 1.0 : 0.0;
            const double d = std::fabs(s.probabilities[c] - truth);
            abs_sum += d;
            sq_sum += d * d;
        }
        abs_total += abs_sum / C;
        sq_total += sq_sum / C;
    }
    const double n = static_cast<double>(scores.size());
    return {abs_total / n, std::sqrt(sq_total / n)};
}

std::vector<ClassRates> per_class_rates(const ConfusionMatrix& cm) {
    if (cm.total == 0) throw MetricError("per-class rates of an empty matrix");
    std::vector<ClassRates> rates(static_cast<std::size_t>(cm.class_count));
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        auto& r = rates[static_cast<std::size_t>(c)];
        const std::uint64_t tp = cm.at(c, c);
        const std::uint64_t row = cm.row_sum(c);
        const std::uint64_t col = cm.col_sum(c);
        if (row > 0) {
            r.tp_rate = static_cast<double>(tp) / static_cast<double>(row);
        } else {
            r.tp_rate_defined = false;
        }
        if (col > 0) {
            r.precision = static_cast<double>(tp) / static_cast<double>(col);
        } else {
            r.precision_defined = false;
        }
        const std::uint64_t negatives = cm.total - row;
        if (negatives > 0) {
            r.fp_rate = static_cast<double>(col - tp) / static_cast<double>(negatives);
        } else {
            r.fp_rate_defined = false;
        }
    }
    return rates;
}

double roc_auc(std::span<const ScoredPrediction> scores, std::int32_t c) {
    // Rank statistic: AUC = (R_pos - P(P+1)/2) / (P*N) with midranks on ties.
    std::vector<std::pair<double, bool>> ranked;
    ranked.reserve(scores.size());
    std::uint64_t positives = 0;
    for (const auto& s : scores) {
        const bool positive = s.true_class == c;
        positives += positive ? 1 : 0;
        ranked.emplace_back(s.probabilities[static_cast<std::size_t>(c)], positive);
    }
    const std::uint64_t negatives = ranked.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw MetricError("ROC area undefined without both positives and negatives");
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double positive_rank_sum = 0;
    std::size_t i = 0;
    while (i < ranked.size()) {
        std::size_t j = i;
        while (j < ranked.size() && ranked[j].first == ranked[i].first) ++j;
        // midrank of the tie group [i, j), 1-based ranks
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) {
            if (ranked[k].second) positive_rank_sum += midrank;
        }
        i = j;
    }
    const double P = static_cast<double>(positives);
    const double N = static_cast<double>(negatives);
    return (positive_rank_sum - P * (P + 1) / 2.0) / (P * N);
}

double weighted_average(std::span<const double> values, const ConfusionMatrix& cm) {
    if (values.size() != static_cast<std::size_t>(cm.class_count)) {
        throw MetricError("value count does not match the matrix arity");
    }
    double weight_sum = 0;
    double value_sum = 0;
    for (std::int32_t c = 0; c < cm.class_count; ++c) {
        const double w = static_cast<double>(cm.row_sum(c));
        weight_sum += w;
        value_sum += w * values[static_cast<std::size_t>(c)];
    }
    if (weight_sum == 0) throw MetricError("weighted average with all supports zero");
    return value_sum / weight_sum;
}

}  // namespace kdd
