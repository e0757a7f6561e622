#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "kddbench/error.hpp"
#include "kddbench/metrics.hpp"
#include "kddbench/report.hpp"
#include "kddbench/rng.hpp"
#include "oracles.hpp"

using namespace kdd;

namespace {

ConfusionMatrix matrix_from(std::initializer_list<std::initializer_list<std::uint64_t>> rows) {
    ConfusionMatrix cm(static_cast<std::int32_t>(rows.size()));
    std::int32_t i = 0;
    for (const auto& row : rows) {
        std::int32_t j = 0;
        for (std::uint64_t cell : row) {
            cm.at(i, j) = cell;
            cm.total += cell;
            ++j;
        }
        ++i;
    }
    return cm;
}

ScoredPrediction sp(std::int32_t truth, std::vector<double> p) {
    return {truth, std::move(p)};
}

// Random confusion matrix plus a coherent score set for oracle comparisons.
struct Fixture {
    ConfusionMatrix cm{0};
    std::vector<ScoredPrediction> scores;
};

Fixture fuzz_fixture(Rng& rng) {
    const std::int32_t C = 2 + static_cast<std::int32_t>(rng.bounded(4));
    Fixture fx;
    fx.cm = ConfusionMatrix(C);
    const std::size_t n = 20 + rng.bounded(60);
    for (std::size_t i = 0; i < n; ++i) {
        const auto truth = static_cast<std::int32_t>(rng.bounded(C));
        std::vector<double> p(static_cast<std::size_t>(C));
        double sum = 0;
        for (double& v : p) {
            v = rng.unit() + 1e-9;
            sum += v;
        }
        for (double& v : p) v /= sum;
        // bias toward the truth so matrices are not pure noise
        if (rng.unit() < 0.6) {
            p[static_cast<std::size_t>(truth)] += 1.0;
            double s2 = 0;
            for (double v : p) s2 += v;
            for (double& v : p) v /= s2;
        }
        fx.cm.add(truth, argmax_lowest(p));
        fx.scores.push_back({truth, std::move(p)});
    }
    return fx;
}

}  // namespace

TEST_CASE("accumulation builds the matrix with argmax and retains scores") {
    EvaluationAccumulator acc(3);
    for (int i = 0; i < 10; ++i) acc.add(sp(1, {0.1, 0.8, 0.1}));
    CHECK(acc.matrix().trace() == 10);
    CHECK(acc.matrix().total == 10);
    CHECK(acc.scores().size() == 10);

    EvaluationAccumulator empty(3);
    CHECK(empty.matrix().total == 0);

    // six mixed predictions against a hand tally
    EvaluationAccumulator mixed(2);
    mixed.add(sp(0, {0.9, 0.1}));
    mixed.add(sp(0, {0.2, 0.8}));
    mixed.add(sp(0, {0.5, 0.5}));  // tie -> class 0, correct
    mixed.add(sp(1, {0.3, 0.7}));
    mixed.add(sp(1, {0.6, 0.4}));
    mixed.add(sp(1, {0.1, 0.9}));
    CHECK(mixed.matrix().at(0, 0) == 2);
    CHECK(mixed.matrix().at(0, 1) == 1);
    CHECK(mixed.matrix().at(1, 0) == 1);
    CHECK(mixed.matrix().at(1, 1) == 2);

    CHECK_THROWS_AS(mixed.add(sp(0, {1.0, 0.0, 0.0})), MetricError);
}

TEST_CASE("accuracy") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 40000;
    cm.at(1, 1) = 16265;
    cm.at(0, 1) = 2000;
    cm.at(1, 0) = 1735;
    cm.total = 60000;
    CHECK(accuracy(cm) == doctest::Approx(0.93775).epsilon(1e-12));

    CHECK(accuracy(matrix_from({{0, 5}, {7, 0}})) == 0.0);
    CHECK(accuracy(matrix_from({{5, 0}, {0, 7}})) == 1.0);
    CHECK_THROWS_AS(static_cast<void>(accuracy(ConfusionMatrix(2))), MetricError);
}

TEST_CASE("kappa") {
    CHECK(kappa(matrix_from({{10, 0}, {0, 5}})) == doctest::Approx(1.0).epsilon(1e-12));
    // rank-1: predictions independent of truth
    CHECK(kappa(matrix_from({{9, 1}, {81, 9}})) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(kappa(matrix_from({{20, 5}, {10, 15}})) == doctest::Approx(0.40).epsilon(1e-12));
    // negative kappa is legal
    CHECK(kappa(matrix_from({{0, 10}, {10, 0}})) < 0.0);
    CHECK_THROWS_AS(static_cast<void>(kappa(matrix_from({{7, 0}, {0, 0}}))), MetricError);
}

TEST_CASE("kappa is 1 exactly when the off-diagonal is empty with 2+ classes") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionMatrix cm(2 + static_cast<std::int32_t>(rng.bounded(3)));
        bool off_diagonal = false;
        std::int32_t populated = 0;
        for (std::int32_t i = 0; i < cm.class_count; ++i) {
            for (std::int32_t j = 0; j < cm.class_count; ++j) {
                const std::uint64_t v = rng.bounded(6);
                cm.at(i, j) = v;
                cm.total += v;
                if (v > 0 && i != j) off_diagonal = true;
            }
            if (cm.row_sum(i) > 0) ++populated;
        }
        if (cm.total == 0) continue;
        try {
            const double k = kappa(cm);
            if (!off_diagonal && populated >= 2) {
                CHECK(k == doctest::Approx(1.0).epsilon(1e-12));
            }
            if (off_diagonal) {
                CHECK(k < 1.0 + 1e-12);
            }
        } catch (const MetricError&) {
            // degenerate single-cell matrix
        }
    }
}

TEST_CASE("MAE and RMSE over probability vectors") {
    std::vector<ScoredPrediction> perfect{sp(0, {1, 0}), sp(1, {0, 1})};
    const auto [mae0, rmse0] = mae_rmse(perfect);
    CHECK(mae0 == 0.0);
    CHECK(rmse0 == 0.0);

    std::vector<ScoredPrediction> half{sp(0, {0.5, 0.5})};
    const auto [mae1, rmse1] = mae_rmse(half);
    CHECK(mae1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rmse1 == doctest::Approx(0.5).epsilon(1e-12));

    for (std::size_t C = 2; C <= 5; ++C) {
        std::vector<ScoredPrediction> uniform{
            sp(1, std::vector<double>(C, 1.0 / static_cast<double>(C)))};
        const auto [mae, rmse] = mae_rmse(uniform);
        const double expected =
            2.0 * (static_cast<double>(C) - 1) / (static_cast<double>(C) * static_cast<double>(C));
        CHECK(mae == doctest::Approx(expected).epsilon(1e-12));
        CHECK(rmse >= mae - 1e-12);  // power-mean inequality per instance
    }
    CHECK_THROWS_AS(static_cast<void>(mae_rmse({})), MetricError);
}

TEST_CASE("per-class rates") {
    const auto perfect = per_class_rates(matrix_from({{7, 0}, {0, 3}}));
    CHECK(perfect[0].tp_rate == 1.0);
    CHECK(perfect[0].fp_rate == 0.0);
    CHECK(perfect[0].precision == 1.0);

    const auto mixed = per_class_rates(matrix_from({{8, 2}, {4, 6}}));
    CHECK(mixed[0].tp_rate == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(mixed[0].fp_rate == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(mixed[0].precision == doctest::Approx(8.0 / 12.0).epsilon(1e-12));

    // nothing ever predicted as class 1: precision 0 with the flag raised
    const auto empty_col = per_class_rates(matrix_from({{10, 0}, {5, 0}}));
    CHECK(empty_col[1].precision == 0.0);
    CHECK(!empty_col[1].precision_defined);
    CHECK(empty_col[0].precision_defined);
}

TEST_CASE("ROC area") {
    std::vector<ScoredPrediction> separated{sp(1, {0.1, 0.9}), sp(1, {0.2, 0.8}),
                                            sp(0, {0.6, 0.4}), sp(0, {0.9, 0.1})};
    CHECK(roc_auc(separated, 1) == 1.0);

    std::vector<ScoredPrediction> ties{sp(1, {0.5, 0.5}), sp(0, {0.5, 0.5}),
                                       sp(1, {0.5, 0.5})};
    CHECK(roc_auc(ties, 1) == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<ScoredPrediction> example{sp(1, {0.1, 0.9}), sp(1, {0.6, 0.4}),
                                          sp(0, {0.4, 0.6}), sp(0, {0.9, 0.1})};
    CHECK(roc_auc(example, 1) == doctest::Approx(0.75).epsilon(1e-12));

    std::vector<ScoredPrediction> single{sp(0, {1, 0})};
    CHECK_THROWS_AS(static_cast<void>(roc_auc(single, 0)), MetricError);
}

TEST_CASE("ROC negation symmetry on tie-free scores") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ScoredPrediction> scores;
        for (int i = 0; i < 30; ++i) {
            const double p = (static_cast<double>(i) + rng.unit() * 0.5) / 31.0;  // distinct
            scores.push_back(sp(static_cast<std::int32_t>(rng.bounded(2)), {1 - p, p}));
        }
        bool both = false;
        int positives = 0;
        for (const auto& s : scores) positives += s.true_class == 1 ? 1 : 0;
        both = positives > 0 && positives < static_cast<int>(scores.size());
        if (!both) continue;
        const double auc = roc_auc(scores, 1);
        for (auto& s : scores) s.probabilities[1] = -s.probabilities[1];
        const double negated = roc_auc(scores, 1);
        CHECK(auc + negated == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("weighted averages") {
    const auto cm = matrix_from({{3, 0}, {1, 0}});  // supports 3 and 1
    CHECK(weighted_average(std::vector<double>{1.0, 0.0}, cm) ==
          doctest::Approx(0.75).epsilon(1e-12));
    CHECK(weighted_average(std::vector<double>{0.4, 0.4}, cm) ==
          doctest::Approx(0.4).epsilon(1e-12));

    const auto zero_support = matrix_from({{4, 0}, {0, 0}});
    CHECK(weighted_average(std::vector<double>{0.5, 123.0}, zero_support) ==
          doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(static_cast<void>(weighted_average(std::vector<double>{0, 0},
                                                       ConfusionMatrix(2))),
                    MetricError);
}

TEST_CASE("metrics are invariant under consistent class permutation") {
    Rng rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        Fixture fx = fuzz_fixture(rng);
        const std::int32_t C = fx.cm.class_count;
        // rotate classes by one
        ConfusionMatrix rotated(C);
        for (std::int32_t i = 0; i < C; ++i) {
            for (std::int32_t j = 0; j < C; ++j) {
                rotated.at((i + 1) % C, (j + 1) % C) = fx.cm.at(i, j);
            }
        }
        rotated.total = fx.cm.total;
        std::vector<ScoredPrediction> rotated_scores;
        for (const auto& s : fx.scores) {
            std::vector<double> p(s.probabilities.size());
            for (std::size_t c = 0; c < p.size(); ++c) {
                p[(c + 1) % p.size()] = s.probabilities[c];
            }
            rotated_scores.push_back(
                {(s.true_class + 1) % C, std::move(p)});
        }
        CHECK(accuracy(rotated) == doctest::Approx(accuracy(fx.cm)).epsilon(1e-12));
        CHECK(kappa(rotated) == doctest::Approx(kappa(fx.cm)).epsilon(1e-12));
        const auto [mae_a, rmse_a] = mae_rmse(fx.scores);
        const auto [mae_b, rmse_b] = mae_rmse(rotated_scores);
        CHECK(mae_a == doctest::Approx(mae_b).epsilon(1e-12));
        CHECK(rmse_a == doctest::Approx(rmse_b).epsilon(1e-12));
    }
}

TEST_CASE("all metrics agree with the brute-force oracle on fuzzed fixtures") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const Fixture fx = fuzz_fixture(rng);
        CHECK(accuracy(fx.cm) == doctest::Approx(testsupport::oracle_accuracy(fx.cm)).epsilon(1e-9));
        try {
            const double mine = kappa(fx.cm);
            CHECK(mine == doctest::Approx(testsupport::oracle_kappa(fx.cm)).epsilon(1e-9));
        } catch (const MetricError&) {
        }
        const auto [mae, rmse] = mae_rmse(fx.scores);
        const auto [omae, ormse] = testsupport::oracle_mae_rmse(fx.scores);
        CHECK(mae == doctest::Approx(omae).epsilon(1e-9));
        CHECK(rmse == doctest::Approx(ormse).epsilon(1e-9));
        const auto rates = per_class_rates(fx.cm);
        const auto orates = testsupport::oracle_per_class_rates(fx.cm);
        for (std::size_t c = 0; c < rates.size(); ++c) {
            CHECK(rates[c].tp_rate == doctest::Approx(orates[c].tp_rate).epsilon(1e-9));
            CHECK(rates[c].fp_rate == doctest::Approx(orates[c].fp_rate).epsilon(1e-9));
            CHECK(rates[c].precision == doctest::Approx(orates[c].precision).epsilon(1e-9));
        }
        for (std::int32_t c = 0; c < fx.cm.class_count; ++c) {
            try {
                const double mine = roc_auc(fx.scores, c);
                CHECK(mine == doctest::Approx(testsupport::oracle_roc_auc(fx.scores, c))
                                  .epsilon(1e-9));
            } catch (const MetricError&) {
            }
        }
        std::vector<double> values(static_cast<std::size_t>(fx.cm.class_count));
        for (auto& v : values) v = rng.unit();
        CHECK(weighted_average(values, fx.cm) ==
              doctest::Approx(testsupport::oracle_weighted_average(values, fx.cm)).epsilon(1e-9));
    }
}

TEST_CASE("report rendering mirrors the benchmark tables") {
    ConfusionMatrix cm(2);
    cm.at(0, 0) = 40000;
    cm.at(1, 1) = 16265;
    cm.at(0, 1) = 2000;
    cm.at(1, 0) = 1735;
    cm.total = 60000;
    std::vector<ScoredPrediction> scores{sp(0, {0.9, 0.1}), sp(1, {0.2, 0.8})};
    const std::vector<std::string> labels{"DOS", "NORMAL"};
    auto report = build_report("random-forest", cm, scores, labels);
    CHECK(report.correct == 56265);
    CHECK(report.incorrect == 3735);

    auto second = build_report("j48", cm, scores, labels);
    const std::vector<EvaluationReport> reports{report, second};
    const std::string text = render_tables(reports);
    CHECK(text.find("93.775 %") != std::string::npos);
    CHECK(text.find("Kappa statistic") != std::string::npos);
    CHECK(text.find("Mean absolute error") != std::string::npos);
    CHECK(text.find("Root mean squared error") != std::string::npos);
    CHECK(text.find("TP Rate") != std::string::npos);
    CHECK(text.find("FP Rate") != std::string::npos);
    CHECK(text.find("Precision") != std::string::npos);
    CHECK(text.find("ROC Area") != std::string::npos);
    CHECK(text.find("Correctly classified Instances") != std::string::npos);
    // rows stay in the order given
    CHECK(text.find("random-forest") < text.find("j48"));

    const std::string csv = render_csv(reports);
    CHECK(csv.find("classifier,metric,value") == 0);
    CHECK(csv.find("random-forest,accuracy,0.93775") != std::string::npos);
    CHECK(csv.find("random-forest,kappa,") != std::string::npos);
    CHECK(csv.find("tp_rate:DOS") != std::string::npos);
}
