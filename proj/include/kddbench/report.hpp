#pragma once

// Per-classifier metric bundle and its renderings: three human-readable
// tables (statistics; weighted TP/FP/precision/ROC; correct/incorrect/
// accuracy) plus a machine-readable long-format CSV at full precision.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kddbench/metrics.hpp"

namespace kdd {

struct PerClassMetrics {
    std::string label;
    std::uint64_t support = 0;
    double tp_rate = 0;
    double fp_rate = 0;
    double precision = 0;
    double roc_area = 0;
    bool roc_defined = true;
};

struct EvaluationReport {
    std::string classifier;
    std::map<std::string, std::string> hyperparameters;
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    double accuracy = 0;
    double kappa = 0;
    double mae = 0;
    double rmse = 0;
    std::vector<PerClassMetrics> per_class;
    double weighted_tp_rate = 0;
    double weighted_fp_rate = 0;
    double weighted_precision = 0;
    double weighted_roc_area = 0;  // undefined per-class areas are excluded
    // Wall-clock seconds; logged to the console but never rendered into
    // report files, which must be byte-identical across reruns.
    double runtime_seconds = 0;
    std::vector<std::string> notes;
};

// Builds the report from accumulated evaluation state. Classes with no
// positives or no negatives get their ROC marked undefined and are left out
// of the weighted ROC mean (noted in `notes`).
EvaluationReport build_report(std::string classifier, const ConfusionMatrix& matrix,
                              std::span<const ScoredPrediction> scores,
                              std::span<const std::string> class_labels);

std::string render_tables(std::span<const EvaluationReport> reports);
std::string render_csv(std::span<const EvaluationReport> reports);

}  // namespace kdd
