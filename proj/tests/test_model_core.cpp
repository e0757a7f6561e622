#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "kddbench/encoder.hpp"
#include "kddbench/error.hpp"
#include "kddbench/metrics.hpp"
#include "kddbench/model.hpp"
#include "synth.hpp"

using namespace kdd;

namespace {

DataTable two_point_table() {
    FeatureLayout layout;
    layout.kinds = {ColumnKind::Numeric, ColumnKind::Numeric};
    layout.slots = {0, 1};
    layout.numeric_count = 2;
    DataTable table(layout, 2);
    const double row0[2] = {0.0, 5.0};
    const double row1[2] = {10.0, 5.0};
    table.add_row(RawInstance{row0, {}}, 0);
    table.add_row(RawInstance{row1, {}}, 1);
    return table;
}

// Mirrors the pipeline wiring: encoder fitted on the raw table, each family
// trained on the representation it consumes.
TrainedModel make_trained(ClassifierKind kind, const DataTable& raw, std::uint64_t seed) {
    TrainedModel model;
    model.info.kind = kind;
    model.info.seed = seed;
    model.info.schema_digest = 0xfeedULL;
    model.class_labels.resize(static_cast<std::size_t>(raw.class_count()));
    for (std::size_t c = 0; c < model.class_labels.size(); ++c) {
        model.class_labels[c] = "c" + std::to_string(c);
    }
    model.encoder = Encoder::fit(raw);
    switch (kind) {
        case ClassifierKind::J48:
            model.impl = train_decision_tree(raw, {});
            break;
        case ClassifierKind::RandomTree: {
            RandomTreeConfig config;
            config.seed = seed;
            model.impl = train_random_tree(raw, config);
            break;
        }
        case ClassifierKind::RandomForest: {
            ForestConfig config;
            config.tree_count = 11;
            config.seed = seed;
            model.impl = train_random_forest(raw, config);
            break;
        }
        case ClassifierKind::Mlp: {
            MlpTrainConfig config;
            config.max_epochs = 40;
            config.seed = seed;
            std::vector<std::vector<double>> inputs;
            std::vector<double> ns;
            std::vector<std::int32_t> nn;
            for (std::size_t i = 0; i < raw.rows(); ++i) {
                inputs.push_back(model.encoder.transform(raw.row(i, ns, nn)));
            }
            model.impl = train_mlp(inputs, raw.classes(), raw.class_count(), config);
            break;
        }
        case ClassifierKind::NaiveBayes:
            model.impl = train_naive_bayes(scale_numeric_columns(raw, model.encoder));
            break;
        case ClassifierKind::BayesNet:
            model.impl = train_bayes_net(scale_numeric_columns(raw, model.encoder));
            break;
    }
    return model;
}

RawInstance fuzz_instance(Rng& rng, std::vector<double>& numeric,
                          std::vector<std::int32_t>& nominal) {
    numeric.resize(2);
    nominal.resize(1);
    numeric[0] = rng.uniform(-0.2, 1.2);
    numeric[1] = rng.uniform(-0.2, 1.2);
    nominal[0] = static_cast<std::int32_t>(rng.bounded(4));
    return RawInstance{numeric, nominal};
}

}  // namespace

TEST_CASE("min-max scaling endpoints, constant columns, and no clamping") {
    const DataTable table = two_point_table();
    const Encoder enc = Encoder::fit(table);

    const double lo[2] = {0.0, 5.0};
    const double hi[2] = {10.0, 5.0};
    const double outside[2] = {20.0, 7.0};
    CHECK(enc.transform(RawInstance{lo, {}}) == std::vector<double>{0.0, 0.0});
    CHECK(enc.transform(RawInstance{hi, {}}) == std::vector<double>{1.0, 0.0});
    // out-of-range scales past 1 (clamping off); constant column spans 1
    CHECK(enc.transform(RawInstance{outside, {}}) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("encoder rejects an empty training set and mismatched arity") {
    FeatureLayout layout;
    layout.kinds = {ColumnKind::Numeric};
    layout.slots = {0};
    layout.numeric_count = 1;
    const DataTable empty(layout, 2);
    CHECK_THROWS_AS(static_cast<void>(Encoder::fit(empty)), Error);

    const Encoder enc = Encoder::fit(two_point_table());
    const double one[1] = {1.0};
    CHECK_THROWS_AS(static_cast<void>(enc.transform(RawInstance{one, {}})), Error);
}

TEST_CASE("one-hot groups have exactly one 1, or all zeros for unseen") {
    const DataTable table = testsupport::synth_blob_table(64, 3, 0.0, 5);
    const Encoder enc = Encoder::fit(table);
    CHECK(enc.encoded_size() == 2 + 3);  // 2 numerics + domain of size 3 (arity 4 incl. unseen)

    std::vector<double> numeric{0.5, 0.5};
    std::vector<std::int32_t> nominal{1};
    auto encoded = enc.transform(RawInstance{numeric, nominal});
    CHECK(encoded[2] == 0.0);
    CHECK(encoded[3] == 1.0);
    CHECK(encoded[4] == 0.0);

    nominal[0] = 3;  // the unseen index
    encoded = enc.transform(RawInstance{numeric, nominal});
    CHECK(encoded[2] == 0.0);
    CHECK(encoded[3] == 0.0);
    CHECK(encoded[4] == 0.0);
}

TEST_CASE("encoding is idempotent on fuzzed instances") {
    const DataTable table = testsupport::synth_blob_table(128, 4, 0.1, 6);
    const Encoder enc = Encoder::fit(table);
    Rng rng(77);
    std::vector<double> numeric;
    std::vector<std::int32_t> nominal;
    for (int i = 0; i < 200; ++i) {
        const RawInstance instance = fuzz_instance(rng, numeric, nominal);
        CHECK(enc.transform(instance) == enc.transform(instance));
    }
}

TEST_CASE("argmax tie-breaks to the lowest class index") {
    CHECK(argmax_lowest(std::vector<double>{0.1, 0.7, 0.1, 0.05, 0.05}) == 1);
    CHECK(argmax_lowest(std::vector<double>{0.5, 0.5, 0, 0, 0}) == 0);
    CHECK(argmax_lowest(std::vector<double>{0.2, 0.2, 0.2, 0.2, 0.2}) == 0);
}

TEST_CASE("models trained on a single class always predict it") {
    FeatureLayout layout;
    layout.kinds = {ColumnKind::Numeric};
    layout.slots = {0};
    layout.numeric_count = 1;
    DataTable table(layout, 3);
    Rng rng(8);
    for (int i = 0; i < 40; ++i) {
        const double x[1] = {rng.unit()};
        table.add_row(RawInstance{x, {}}, 2);
    }
    for (auto kind : {ClassifierKind::J48, ClassifierKind::NaiveBayes}) {
        const TrainedModel model = make_trained(kind, table, 1);
        for (int i = 0; i < 20; ++i) {
            const double x[1] = {rng.unit()};
            CHECK(model.predict_class(RawInstance{x, {}}) == 2);
        }
    }
}

TEST_CASE("every model family predicts valid probability vectors") {
    const DataTable table = testsupport::synth_blob_table(200, 3, 0.1, 9);
    Rng rng(123);
    std::vector<double> numeric;
    std::vector<std::int32_t> nominal;
    for (auto kind : {ClassifierKind::J48, ClassifierKind::RandomTree,
                      ClassifierKind::RandomForest, ClassifierKind::Mlp,
                      ClassifierKind::NaiveBayes, ClassifierKind::BayesNet}) {
        const TrainedModel model = make_trained(kind, table, 3);
        std::vector<double> dist;
        for (int i = 0; i < 100; ++i) {
            model.predict_distribution(fuzz_instance(rng, numeric, nominal), dist);
            REQUIRE(dist.size() == 3);
            double sum = 0;
            for (double p : dist) {
                CHECK(p >= 0.0);
                sum += p;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("persistence round-trips bit-exact predictions for every family") {
    const DataTable table = testsupport::synth_blob_table(300, 3, 0.15, 11);
    const auto tmp = std::filesystem::temp_directory_path() / "kddbench_model_test.bin";
    for (auto kind : {ClassifierKind::J48, ClassifierKind::RandomTree,
                      ClassifierKind::RandomForest, ClassifierKind::Mlp,
                      ClassifierKind::NaiveBayes, ClassifierKind::BayesNet}) {
        const TrainedModel model = make_trained(kind, table, 17);
        save_model(model, tmp.string());
        const TrainedModel loaded = load_model(tmp.string(), 0xfeedULL);
        CHECK(loaded.info.kind == kind);
        CHECK(loaded.info.seed == 17);
        CHECK(loaded.class_labels == model.class_labels);

        Rng rng(55);
        std::vector<double> numeric;
        std::vector<std::int32_t> nominal;
        std::vector<double> before;
        std::vector<double> after;
        for (int i = 0; i < 1000; ++i) {
            const RawInstance instance = fuzz_instance(rng, numeric, nominal);
            model.predict_distribution(instance, before);
            loaded.predict_distribution(instance, after);
            REQUIRE(before == after);  // bit-exact
        }
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("truncated model files never load partially") {
    const DataTable table = testsupport::synth_blob_table(100, 2, 0.0, 13);
    const TrainedModel model = make_trained(ClassifierKind::RandomForest, table, 2);
    const auto tmp = std::filesystem::temp_directory_path() / "kddbench_trunc_test.bin";
    save_model(model, tmp.string());

    const auto full_size = std::filesystem::file_size(tmp.string());
    // shrink progressively so each cut is a true prefix of the original
    std::filesystem::resize_file(tmp.string(), full_size - 5);
    CHECK_THROWS_AS(static_cast<void>(load_model(tmp.string())), ModelTruncationError);
    for (const auto fraction : {0.9, 0.5, 0.2}) {
        std::filesystem::resize_file(tmp.string(),
                                     static_cast<std::uintmax_t>(full_size * fraction));
        CHECK_THROWS_AS(static_cast<void>(load_model(tmp.string())), ModelTruncationError);
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("digest and version mismatches are distinct errors") {
    const DataTable table = testsupport::synth_blob_table(60, 2, 0.0, 14);
    const TrainedModel model = make_trained(ClassifierKind::J48, table, 2);
    const auto tmp = std::filesystem::temp_directory_path() / "kddbench_digest_test.bin";
    save_model(model, tmp.string());

    CHECK_THROWS_AS(static_cast<void>(load_model(tmp.string(), 0xdeadULL)), ModelDigestError);
    CHECK_NOTHROW(static_cast<void>(load_model(tmp.string(), 0xfeedULL)));

    // flip the version field (bytes 4..7)
    {
        std::FILE* f = std::fopen(tmp.string().c_str(), "r+b");
        REQUIRE(f != nullptr);
        std::fseek(f, 4, SEEK_SET);
        const unsigned char bogus[4] = {0xff, 0, 0, 0};
        std::fwrite(bogus, 1, 4, f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(static_cast<void>(load_model(tmp.string())), ModelVersionError);
    std::filesystem::remove(tmp);
}

TEST_CASE("classifier names parse both ways") {
    CHECK(parse_classifier("j48") == ClassifierKind::J48);
    CHECK(parse_classifier("random-forest") == ClassifierKind::RandomForest);
    CHECK(parse_classifier("bayes-net") == ClassifierKind::BayesNet);
    CHECK(!parse_classifier("decision-table").has_value());
    CHECK(to_string(ClassifierKind::Mlp) == "mlp");
}
