#include "kddbench/report.hpp"

#include <cstdio>
#include <cstring>

#include "kddbench/error.hpp"

namespace kdd {

namespace {

std::string fixed(double v, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, v);
    return buf;
}

// e.g. 0.93775 -> "93.775 %": percent with up to four decimals, trailing
// zeros trimmed.
std::string percent(double fraction) {
    std::string s = fixed(fraction * 100.0, 4);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s + " %";
}

std::string precise(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

void render_row(std::string& out, std::span<const std::string> cells,
                std::span<const std::size_t> widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out += cells[i];
        if (i + 1 < cells.size()) {
            out.append(widths[i] > cells[i].size() ? widths[i] - cells[i].size() + 2 : 2, ' ');
        }
    }
    out += '\n';
}

void render_table(std::string& out, const std::string& title,
                  const std::vector<std::vector<std::string>>& rows) {
    out += "=== " + title + " ===\n";
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    for (const auto& row : rows) render_row(out, row, widths);
    out += '\n';
}

}  // namespace

EvaluationReport build_report(std::string classifier, const ConfusionMatrix& matrix,
                              std::span<const ScoredPrediction> scores,
                              std::span<const std::string> class_labels) {
    if (class_labels.size() != static_cast<std::size_t>(matrix.class_count)) {
        throw MetricError("label count does not match the matrix arity");
    }
    EvaluationReport report;
    report.classifier = std::move(classifier);
    report.correct = matrix.trace();
    report.incorrect = matrix.total - report.correct;
    report.accuracy = accuracy(matrix);
    report.kappa = kappa(matrix);
    const auto [mae, rmse] = mae_rmse(scores);
    report.mae = mae;
    report.rmse = rmse;

    const auto rates = per_class_rates(matrix);
    std::vector<double> tp(rates.size()), fp(rates.size()), prec(rates.size());
    double roc_weight_sum = 0;
    double roc_value_sum = 0;
    for (std::size_t c = 0; c < rates.size(); ++c) {
        PerClassMetrics pc;
        pc.label = class_labels[c];
        pc.support = matrix.row_sum(static_cast<std::int32_t>(c));
        pc.tp_rate = rates[c].tp_rate;
        pc.fp_rate = rates[c].fp_rate;
        pc.precision = rates[c].precision;
        if (!rates[c].precision_defined) {
            report.notes.push_back("precision of " + pc.label +
                                   " undefined (never predicted); reported as 0");
        }
        tp[c] = pc.tp_rate;
        fp[c] = pc.fp_rate;
        prec[c] = pc.precision;
        try {
            pc.roc_area = roc_auc(scores, static_cast<std::int32_t>(c));
            roc_weight_sum += static_cast<double>(pc.support);
            roc_value_sum += static_cast<double>(pc.support) * pc.roc_area;
        } catch (const MetricError&) {
            pc.roc_defined = false;
            report.notes.push_back("ROC area of " + pc.label +
                                   " undefined (single-class scores); excluded from the weighted mean");
        }
        report.per_class.push_back(std::move(pc));
    }
    report.weighted_tp_rate = weighted_average(tp, matrix);
    report.weighted_fp_rate = weighted_average(fp, matrix);
    report.weighted_precision = weighted_average(prec, matrix);
    report.weighted_roc_area = roc_weight_sum > 0 ? roc_value_sum / roc_weight_sum : 0.0;
    return report;
}

std::string render_tables(std::span<const EvaluationReport> reports) {
    if (reports.empty()) throw MetricError("nothing to render");
    std::string out;

    std::vector<std::vector<std::string>> stats{
        {"Classifier", "Kappa statistic", "Mean absolute error", "Root mean squared error"}};
    for (const auto& r : reports) {
        stats.push_back({r.classifier, fixed(r.kappa, 4), fixed(r.mae, 4), fixed(r.rmse, 4)});
    }
    render_table(out, "Statistical values", stats);

    std::vector<std::vector<std::string>> weighted{
        {"Classifier", "TP Rate", "FP Rate", "Precision", "ROC Area"}};
    for (const auto& r : reports) {
        weighted.push_back({r.classifier, fixed(r.weighted_tp_rate, 3),
                            fixed(r.weighted_fp_rate, 3), fixed(r.weighted_precision, 3),
                            fixed(r.weighted_roc_area, 3)});
    }
    render_table(out, "Weighted average for true positive (TP) and false positive (FP)", weighted);

    std::vector<std::vector<std::string>> acc{{"Classifier", "Correctly classified Instances",
                                               "Incorrectly classified Instances", "Accuracy"}};
    for (const auto& r : reports) {
        acc.push_back({r.classifier, std::to_string(r.correct), std::to_string(r.incorrect),
                       percent(r.accuracy)});
    }
    render_table(out, "Accuracy rate", acc);

    for (const auto& r : reports) {
        for (const auto& note : r.notes) {
            out += "note (" + r.classifier + "): " + note + "\n";
        }
    }
    return out;
}

std::string render_csv(std::span<const EvaluationReport> reports) {
    std::string out = "classifier,metric,value\n";
    auto row = [&out](const std::string& classifier, const std::string& metric,
                      const std::string& value) {
        out += classifier + "," + metric + "," + value + "\n";
    };
    for (const auto& r : reports) {
        row(r.classifier, "correct", std::to_string(r.correct));
        row(r.classifier, "incorrect", std::to_string(r.incorrect));
        row(r.classifier, "accuracy", precise(r.accuracy));
        row(r.classifier, "kappa", precise(r.kappa));
        row(r.classifier, "mean_absolute_error", precise(r.mae));
        row(r.classifier, "root_mean_squared_error", precise(r.rmse));
        row(r.classifier, "tp_rate", precise(r.weighted_tp_rate));
        row(r.classifier, "fp_rate", precise(r.weighted_fp_rate));
        row(r.classifier, "precision", precise(r.weighted_precision));
        row(r.classifier, "roc_area", precise(r.weighted_roc_area));
        for (const auto& pc : r.per_class) {
            row(r.classifier, "tp_rate:" + pc.label, precise(pc.tp_rate));
            row(r.classifier, "fp_rate:" + pc.label, precise(pc.fp_rate));
            row(r.classifier, "precision:" + pc.label, precise(pc.precision));
            if (pc.roc_defined) row(r.classifier, "roc_area:" + pc.label, precise(pc.roc_area));
            row(r.classifier, "support:" + pc.label, std::to_string(pc.support));
        }
    }
    return out;
}

}  // namespace kdd
