#pragma once

// Confusion matrix and the statistics reported by the benchmark: accuracy,
// Cohen's kappa, MAE/RMSE over probability vectors against one-hot truth,
// per-class and support-weighted TP/FP/precision, and one-vs-rest ROC area
// via the rank statistic. A brute-force oracle in the test suite must agree
// with everything here to 1e-9.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace kdd {

struct ConfusionMatrix {
    std::int32_t class_count = 0;
    std::vector<std::uint64_t> cells;  // row-major, cell(i,j) = true i predicted j
    std::uint64_t total = 0;

    explicit ConfusionMatrix(std::int32_t classes = 0)
        : class_count(classes),
          cells(static_cast<std::size_t>(classes) * static_cast<std::size_t>(classes), 0) {}

    std::uint64_t& at(std::int32_t t, std::int32_t p) {
        return cells[static_cast<std::size_t>(t) * static_cast<std::size_t>(class_count) +
                     static_cast<std::size_t>(p)];
    }
    std::uint64_t at(std::int32_t t, std::int32_t p) const {
        return cells[static_cast<std::size_t>(t) * static_cast<std::size_t>(class_count) +
                     static_cast<std::size_t>(p)];
    }
    std::uint64_t row_sum(std::int32_t t) const;
    std::uint64_t col_sum(std::int32_t p) const;
    std::uint64_t trace() const;
    void add(std::int32_t true_class, std::int32_t predicted) {
        ++at(true_class, predicted);
        ++total;
    }
    void merge(const ConfusionMatrix& other);
};

struct ScoredPrediction {
    std::int32_t true_class = 0;
    std::vector<double> probabilities;
};

std::int32_t argmax_lowest(std::span<const double> values);

// One-pass accumulation retaining the raw scores for MAE/RMSE/ROC.
class EvaluationAccumulator {
public:
    explicit EvaluationAccumulator(std::int32_t class_count)
        : matrix_(class_count) {}

    void add(ScoredPrediction prediction);
    void merge(EvaluationAccumulator&& other);

    const ConfusionMatrix& matrix() const { return matrix_; }
    const std::vector<ScoredPrediction>& scores() const { return scores_; }

private:
    ConfusionMatrix matrix_;
    std::vector<ScoredPrediction> scores_;
};

double accuracy(const ConfusionMatrix& cm);

// (p_o - p_e) / (1 - p_e); undefined when chance agreement is exactly 1
// (all mass in a single cell).
double kappa(const ConfusionMatrix& cm);

// MAE: mean over instances of the class-averaged absolute error between the
// probability vector and the one-hot truth. RMSE: square root of the same
// construction with squared errors.
std::pair<double, double> mae_rmse(std::span<const ScoredPrediction> scores);

struct ClassRates {
    double tp_rate = 0;
    double fp_rate = 0;
    double precision = 0;
    bool tp_rate_defined = true;    // false when the class has no true instances
    bool precision_defined = true;  // false when nothing was predicted as the class
    bool fp_rate_defined = true;
};

std::vector<ClassRates> per_class_rates(const ConfusionMatrix& cm);

// One-vs-rest AUC of class c under its predicted probability, ties counted
// half. Throws MetricError when the class has no positives or no negatives.
double roc_auc(std::span<const ScoredPrediction> scores, std::int32_t c);

// Support-weighted mean of per-class values (weights = true-class row sums).
double weighted_average(std::span<const double> values, const ConfusionMatrix& cm);

}  // namespace kdd
