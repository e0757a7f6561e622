// kddbench: count, sample, train, evaluate and bench subcommands over the
// KDD Cup 99 corpus format.
//
// Exit codes are frozen for scripting: 0 ok, 2 parse failure, 3 infeasible
// sampling plan, 4 training failure, 5 schema-digest mismatch, 64 usage
// error, 66 missing input file.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unordered_map>

#include "CLI11.hpp"
#include "kddbench/byte_source.hpp"
#include "kddbench/census.hpp"
#include "kddbench/error.hpp"
#include "kddbench/model.hpp"
#include "kddbench/record_reader.hpp"
#include "kddbench/report.hpp"
#include "kddbench/sampling.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitPlan = 3;
constexpr int kExitTraining = 4;
constexpr int kExitDigest = 5;
constexpr int kExitUsage = 64;
constexpr int kExitMissingInput = 66;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_input(const std::string& path, const char* what) {
    if (!fs::exists(path)) {
        throw kdd::IoError(std::string("missing ") + what + ": " + path);
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw kdd::Error("cannot write " + path);
    out << content;
    if (!out) throw kdd::Error("short write: " + path);
}

struct Options {
    std::string corpus;
    std::string schema_path = "data/kdd99.schema";
    std::string plan_path = "data/table2.plan";
    std::string output = "-";
    std::string out_dir = ".";
    std::string manifest;
    std::string model_path;
    std::string log_path;
    std::string report_prefix = "report";
    std::string classifier;
    std::string on_error = "abort";
    std::uint64_t test_size = 60000;
    std::uint64_t seed = 1;
    bool seed_given = false;
    unsigned jobs = 0;

    // tree family
    double confidence_factor = 0.25;
    std::uint32_t min_leaf = 2;
    std::uint32_t num_folds = 3;
    bool unpruned = false;
    bool no_subtree_raising = false;
    bool no_collapse = false;
    bool gain_ratio = false;
    std::uint32_t num_trees = 100;
    std::uint32_t m_tries = 0;
    double min_gain = 0.001;

    // mlp
    double learning_rate = 0.3;
    double momentum = 0.2;
    std::uint32_t validation_threshold = 20;
    double validation_fraction = 0.0;
    std::uint32_t epochs = 500;
    std::uint32_t hidden = 0;

    // bayes
    double nb_alpha = 1.0;
    double variance_floor = 1e-9;
    double bn_alpha = 0.5;
    std::uint32_t max_parents = 1;
    std::uint32_t bins = 10;
};

kdd::RecordReader::OnError error_policy(const Options& opt) {
    if (opt.on_error == "abort") return kdd::RecordReader::OnError::Abort;
    if (opt.on_error == "skip") return kdd::RecordReader::OnError::Skip;
    throw CLI::ValidationError("--on-error must be 'abort' or 'skip'");
}

std::vector<std::string> category_labels() {
    std::vector<std::string> labels;
    for (auto name : kdd::kCategoryNames) labels.emplace_back(name);
    return labels;
}

// --- train helpers -------------------------------------------------------

struct TrainOutput {
    kdd::TrainedModel model;
    std::string log;  // plain-text training log (epoch CSV for the MLP)
};

std::map<std::string, std::string> common_params(const Options& opt) {
    return {{"seed", std::to_string(opt.seed)}};
}

TrainOutput train_one(kdd::ClassifierKind kind, const std::vector<kdd::ConnectionRecord>& records,
                      const kdd::FeatureSchema& schema, const Options& opt) {
    const auto taxonomy = kdd::AttackTaxonomy::standard();
    kdd::TableBuildStats stats;
    const kdd::DataTable raw = kdd::build_table(records, schema, taxonomy, &stats);
    if (raw.rows() == 0) throw kdd::TrainingError("no trainable records in the manifest");

    TrainOutput out;
    out.model.info.kind = kind;
    out.model.info.seed = opt.seed;
    out.model.info.schema_digest = schema.digest();
    out.model.info.hyperparameters = common_params(opt);
    out.model.class_labels = category_labels();
    out.model.encoder = kdd::Encoder::fit(raw);
    auto& params = out.model.info.hyperparameters;
    if (stats.skipped_unknown_category > 0) {
        out.log += "skipped_unknown_category=" +
                   std::to_string(stats.skipped_unknown_category) + "\n";
    }

    switch (kind) {
        case kdd::ClassifierKind::J48: {
            kdd::DecisionTreeConfig config;
            config.confidence_factor = opt.confidence_factor;
            config.min_leaf = opt.min_leaf;
            config.pruned = !opt.unpruned;
            config.subtree_raising = !opt.no_subtree_raising;
            config.collapse = !opt.no_collapse;
            config.use_gain_ratio = opt.gain_ratio;
            config.num_folds = opt.num_folds;
            params["confidence_factor"] = std::to_string(config.confidence_factor);
            params["min_leaf"] = std::to_string(config.min_leaf);
            params["num_folds"] = std::to_string(config.num_folds);
            params["pruned"] = config.pruned ? "true" : "false";
            auto model = kdd::train_decision_tree(raw, config);
            out.log += "leaves=" + std::to_string(model.tree.leaf_count()) + "\n";
            out.model.impl = std::move(model);
            break;
        }
        case kdd::ClassifierKind::RandomTree: {
            kdd::RandomTreeConfig config;
            config.m_tries = opt.m_tries;
            config.min_gain = opt.min_gain;
            config.seed = opt.seed;
            params["min_gain"] = std::to_string(config.min_gain);
            auto model = kdd::train_random_tree(raw, config);
            params["m_tries"] = std::to_string(model.config.m_tries);
            out.log += "leaves=" + std::to_string(model.tree.leaf_count()) + "\n";
            out.model.impl = std::move(model);
            break;
        }
        case kdd::ClassifierKind::RandomForest: {
            kdd::ForestConfig config;
            config.tree_count = opt.num_trees;
            config.m_tries = opt.m_tries;
            config.seed = opt.seed;
            config.min_gain = opt.min_gain;
            config.parallelism = opt.jobs;
            params["trees"] = std::to_string(config.tree_count);
            auto model = kdd::train_random_forest(raw, config);
            params["m_tries"] = std::to_string(model.config.m_tries);
            const double oob = kdd::oob_error(model, raw);
            char buf[64];
            std::snprintf(buf, sizeof(buf), "oob_error=%.6f\n", oob);
            out.log += buf;
            out.model.impl = std::move(model);
            break;
        }
        case kdd::ClassifierKind::Mlp: {
            kdd::MlpTrainConfig config;
            config.learning_rate = opt.learning_rate;
            config.momentum = opt.momentum;
            config.validation_threshold = opt.validation_threshold;
            config.validation_fraction = opt.validation_fraction;
            config.max_epochs = opt.epochs;
            config.hidden_units = opt.hidden;
            config.seed = opt.seed;
            params["learning_rate"] = std::to_string(config.learning_rate);
            params["momentum"] = std::to_string(config.momentum);
            params["validation_threshold"] = std::to_string(config.validation_threshold);
            params["epochs"] = std::to_string(config.max_epochs);

            std::vector<std::vector<double>> inputs;
            inputs.reserve(raw.rows());
            std::vector<double> numeric_scratch;
            std::vector<std::int32_t> nominal_scratch;
            for (std::size_t i = 0; i < raw.rows(); ++i) {
                inputs.push_back(
                    out.model.encoder.transform(raw.row(i, numeric_scratch, nominal_scratch)));
            }
            std::vector<kdd::EpochLog> log;
            auto model = kdd::train_mlp(inputs, raw.classes(),
                                        raw.class_count(), config, &log);
            params["hidden_units"] = std::to_string(model.topology.hidden);
            out.log += kdd::epoch_log_to_csv(log);
            out.model.impl = std::move(model);
            break;
        }
        case kdd::ClassifierKind::NaiveBayes: {
            params["alpha"] = std::to_string(opt.nb_alpha);
            const kdd::DataTable scaled = kdd::scale_numeric_columns(raw, out.model.encoder);
            out.model.impl = kdd::train_naive_bayes(scaled, opt.nb_alpha, opt.variance_floor);
            break;
        }
        case kdd::ClassifierKind::BayesNet: {
            kdd::BayesNetConfig config;
            config.alpha = opt.bn_alpha;
            config.max_parents = opt.max_parents;
            config.numeric_bins = opt.bins;
            params["alpha"] = std::to_string(config.alpha);
            params["max_parents"] = std::to_string(config.max_parents);
            params["bins"] = std::to_string(config.numeric_bins);
            const kdd::DataTable scaled = kdd::scale_numeric_columns(raw, out.model.encoder);
            auto model = kdd::train_bayes_net(scaled, config);
            out.log += kdd::render_network(model);
            out.model.impl = std::move(model);
            break;
        }
    }
    return out;
}

// Records selected by a manifest, in manifest order (training order).
std::vector<kdd::ConnectionRecord> records_by_manifest(const std::string& corpus,
                                                       const kdd::FeatureSchema& schema,
                                                       const std::vector<std::uint64_t>& ordinals,
                                                       kdd::RecordReader::OnError policy) {
    std::unordered_map<std::uint64_t, kdd::ConnectionRecord> wanted;
    wanted.reserve(ordinals.size());
    for (std::uint64_t o : ordinals) wanted.emplace(o, kdd::ConnectionRecord{});
    auto source = kdd::open_source(corpus);
    kdd::RecordReader reader(*source, schema, policy);
    kdd::ConnectionRecord rec;
    std::uint64_t ordinal = 0;
    std::size_t found = 0;
    while (found < wanted.size() && reader.next(rec)) {
        auto it = wanted.find(ordinal++);
        if (it != wanted.end()) {
            it->second = rec;
            ++found;
        }
    }
    if (found != wanted.size()) {
        throw kdd::PlanError("manifest references ordinals beyond the corpus");
    }
    std::vector<kdd::ConnectionRecord> records;
    records.reserve(ordinals.size());
    for (std::uint64_t o : ordinals) records.push_back(std::move(wanted.at(o)));
    return records;
}

kdd::EvaluationReport evaluate_streaming(const kdd::TrainedModel& model,
                                         const std::string& corpus,
                                         const kdd::FeatureSchema& schema,
                                         const std::vector<std::uint64_t>& test_ordinals,
                                         kdd::RecordReader::OnError policy) {
    const auto taxonomy = kdd::AttackTaxonomy::standard();
    std::vector<std::uint64_t> sorted(test_ordinals);
    std::sort(sorted.begin(), sorted.end());

    kdd::EvaluationAccumulator accumulator(model.class_count());
    auto source = kdd::open_source(corpus);
    kdd::RecordReader reader(*source, schema, policy);
    kdd::ConnectionRecord rec;
    std::uint64_t ordinal = 0;
    std::size_t cursor = 0;
    std::uint64_t skipped_unknown = 0;
    std::vector<double> dist;
    while (cursor < sorted.size() && reader.next(rec)) {
        if (ordinal++ != sorted[cursor]) continue;
        ++cursor;
        const kdd::Category c = taxonomy.categorize(rec.label);
        if (c == kdd::Category::Unknown) {
            ++skipped_unknown;
            continue;
        }
        model.predict_distribution(kdd::as_instance(rec), dist);
        accumulator.add({static_cast<std::int32_t>(c), dist});
    }
    if (cursor < sorted.size()) {
        throw kdd::PlanError("manifest references ordinals beyond the corpus");
    }
    auto report =
        kdd::build_report(std::string(kdd::to_string(model.info.kind)), accumulator.matrix(),
                          accumulator.scores(), model.class_labels);
    report.hyperparameters = model.info.hyperparameters;
    if (skipped_unknown > 0) {
        report.notes.push_back(std::to_string(skipped_unknown) +
                               " test records outside the attack taxonomy were skipped");
    }
    return report;
}

// --- subcommands ---------------------------------------------------------

int cmd_count(const Options& opt) {
    require_input(opt.corpus, "corpus");
    require_input(opt.schema_path, "schema");
    const auto schema = kdd::load_schema(opt.schema_path);
    const auto start = Clock::now();
    auto source = kdd::open_source(opt.corpus);
    kdd::RecordReader reader(*source, schema, error_policy(opt));
    const kdd::LabelCensus census = kdd::census(reader);
    const std::string csv = kdd::census_to_csv(census);
    if (opt.output == "-") {
        std::cout << csv;
    } else {
        write_file(opt.output, csv);
    }
    std::fprintf(stderr, "[count] %llu records, %llu distinct labels, %.2fs\n",
                 static_cast<unsigned long long>(census.total),
                 static_cast<unsigned long long>(census.counts.size()), seconds_since(start));
    if (reader.stats().skipped > 0) {
        std::fprintf(stderr, "[count] skipped %llu malformed lines (last: %s)\n",
                     static_cast<unsigned long long>(reader.stats().skipped),
                     reader.stats().last_error.c_str());
    }
    return kExitOk;
}

int cmd_sample(const Options& opt) {
    require_input(opt.corpus, "corpus");
    require_input(opt.schema_path, "schema");
    require_input(opt.plan_path, "plan");
    const auto schema = kdd::load_schema(opt.schema_path);
    kdd::SamplingPlan plan = kdd::load_plan(opt.plan_path);
    if (opt.seed_given) plan.seed = opt.seed;
    if (!plan.note.empty()) std::fprintf(stderr, "[sample] plan note: %s\n", plan.note.c_str());
    std::fprintf(stderr, "[sample] plan total %llu, seed %llu\n",
                 static_cast<unsigned long long>(plan.total()),
                 static_cast<unsigned long long>(plan.seed));

    // one corpus pass to index ordinals by label
    kdd::StratifiedIndex index;
    std::vector<std::string> train_labels;
    {
        auto source = kdd::open_source(opt.corpus);
        kdd::RecordReader reader(*source, schema, error_policy(opt));
        kdd::ConnectionRecord rec;
        std::uint64_t ordinal = 0;
        while (reader.next(rec)) index.add(rec.label, ordinal++);
    }

    const auto train = kdd::stratified_sample(index, plan);
    const auto split = kdd::holdout_sample(index.total, train, opt.test_size, plan.seed);

    fs::create_directories(opt.out_dir);
    const std::string train_path = (fs::path(opt.out_dir) / "train.manifest").string();
    const std::string test_path = (fs::path(opt.out_dir) / "test.manifest").string();
    kdd::write_manifest(train_path, split.train, "train");
    kdd::write_manifest(test_path, split.test, "test");

    // category proportions of the extract, for the log
    {
        std::unordered_map<std::uint64_t, const std::string*> label_of;
        for (const auto& [label, ordinals] : index.by_label) {
            for (std::uint64_t o : ordinals) label_of.emplace(o, &label);
        }
        std::vector<std::string> labels;
        labels.reserve(split.train.size());
        for (std::uint64_t o : split.train) labels.push_back(*label_of.at(o));
        const auto proportions =
            kdd::class_proportions(labels, kdd::AttackTaxonomy::standard());
        std::string line = "[sample] train extract proportions:";
        for (const auto& [category, fraction] : proportions) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), " %s=%.4f", std::string(to_string(category)).c_str(),
                          fraction);
            line += buf;
        }
        std::fprintf(stderr, "%s\n", line.c_str());
    }
    std::fprintf(stderr, "[sample] wrote %s (%zu ordinals) and %s (%zu ordinals)\n",
                 train_path.c_str(), split.train.size(), test_path.c_str(), split.test.size());
    return kExitOk;
}

int cmd_train(const Options& opt) {
    require_input(opt.corpus, "corpus");
    require_input(opt.schema_path, "schema");
    require_input(opt.manifest, "manifest");
    if (opt.classifier == "decision-table") {
        std::fprintf(stderr, "classifier 'decision-table' is reserved but not implemented\n");
        return kExitUsage;
    }
    const auto kind = kdd::parse_classifier(opt.classifier);
    if (!kind) {
        std::fprintf(stderr, "unknown classifier '%s'\n", opt.classifier.c_str());
        return kExitUsage;
    }
    const auto schema = kdd::load_schema(opt.schema_path);
    const auto ordinals = kdd::read_manifest(opt.manifest);
    const auto start = Clock::now();
    const auto records = records_by_manifest(opt.corpus, schema, ordinals, error_policy(opt));
    const TrainOutput trained = train_one(*kind, records, schema, opt);

    const std::string model_path =
        opt.model_path.empty() ? opt.classifier + ".model" : opt.model_path;
    const std::string log_path = opt.log_path.empty() ? model_path + ".log" : opt.log_path;
    kdd::save_model(trained.model, model_path);
    write_file(log_path, trained.log);
    std::fprintf(stderr, "[train] %s on %zu records in %.2fs -> %s\n", opt.classifier.c_str(),
                 records.size(), seconds_since(start), model_path.c_str());
    return kExitOk;
}

int cmd_evaluate(const Options& opt) {
    require_input(opt.corpus, "corpus");
    require_input(opt.schema_path, "schema");
    require_input(opt.manifest, "manifest");
    require_input(opt.model_path, "model");
    const auto schema = kdd::load_schema(opt.schema_path);
    const kdd::TrainedModel model = kdd::load_model(opt.model_path, schema.digest());
    const auto ordinals = kdd::read_manifest(opt.manifest);
    const auto start = Clock::now();
    auto report = evaluate_streaming(model, opt.corpus, schema, ordinals, error_policy(opt));
    report.runtime_seconds = seconds_since(start);

    const std::vector<kdd::EvaluationReport> reports{report};
    write_file(opt.report_prefix + ".txt", kdd::render_tables(reports));
    write_file(opt.report_prefix + ".csv", kdd::render_csv(reports));
    std::cout << kdd::render_tables(reports);
    std::fprintf(stderr, "[evaluate] %llu instances in %.2fs\n",
                 static_cast<unsigned long long>(report.correct + report.incorrect),
                 report.runtime_seconds);
    return kExitOk;
}

int cmd_bench(const Options& opt) {
    require_input(opt.corpus, "corpus");
    require_input(opt.schema_path, "schema");
    require_input(opt.plan_path, "plan");
    fs::create_directories(opt.out_dir);

    Options stage = opt;
    stage.out_dir = opt.out_dir;
    auto start = Clock::now();
    const int sample_rc = cmd_sample(stage);
    if (sample_rc != kExitOk) return sample_rc;
    std::fprintf(stderr, "[bench] sample stage: %.2fs\n", seconds_since(start));

    const auto schema = kdd::load_schema(opt.schema_path);
    const auto train_ordinals =
        kdd::read_manifest((fs::path(opt.out_dir) / "train.manifest").string());
    const auto test_ordinals =
        kdd::read_manifest((fs::path(opt.out_dir) / "test.manifest").string());
    const auto records =
        records_by_manifest(opt.corpus, schema, train_ordinals, error_policy(opt));

    std::vector<kdd::EvaluationReport> reports;
    for (auto kind : {kdd::ClassifierKind::J48, kdd::ClassifierKind::RandomForest,
                      kdd::ClassifierKind::RandomTree, kdd::ClassifierKind::Mlp,
                      kdd::ClassifierKind::NaiveBayes, kdd::ClassifierKind::BayesNet}) {
        const std::string name(kdd::to_string(kind));
        start = Clock::now();
        const TrainOutput trained = train_one(kind, records, schema, opt);
        const double train_seconds = seconds_since(start);
        const std::string model_path = (fs::path(opt.out_dir) / (name + ".model")).string();
        kdd::save_model(trained.model, model_path);
        write_file(model_path + ".log", trained.log);

        start = Clock::now();
        auto report =
            evaluate_streaming(trained.model, opt.corpus, schema, test_ordinals, error_policy(opt));
        report.runtime_seconds = seconds_since(start);
        std::fprintf(stderr, "[bench] %s: train %.2fs, evaluate %.2fs\n", name.c_str(),
                     train_seconds, report.runtime_seconds);
        reports.push_back(std::move(report));
    }

    write_file((fs::path(opt.out_dir) / "report.txt").string(), kdd::render_tables(reports));
    write_file((fs::path(opt.out_dir) / "report.csv").string(), kdd::render_csv(reports));
    std::cout << kdd::render_tables(reports);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KDD Cup 99 intrusion-detection classifier benchmark"};
    app.require_subcommand(1);
    app.set_config("--config");
    Options opt;

    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--corpus", opt.corpus, "KDD-format corpus (plain or gzip)");
        cmd->add_option("--schema", opt.schema_path, "schema file")
            ->capture_default_str();
        cmd->add_option("--on-error", opt.on_error, "bad-line policy: abort|skip")
            ->capture_default_str();
    };

    CLI::App* count = app.add_subcommand("count", "per-label instance census");
    add_common(count);
    count->add_option("--output", opt.output, "census CSV path, '-' for stdout")
        ->capture_default_str();

    CLI::App* sample = app.add_subcommand("sample", "stratified train extract + holdout test split");
    add_common(sample);
    sample->add_option("--plan", opt.plan_path, "sampling plan file")->capture_default_str();
    sample->add_option("--test-size", opt.test_size, "holdout size")->capture_default_str();
    sample->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sample->add_option("--seed", opt.seed, "override the plan seed")
        ->trigger_on_parse()
        ->each([&opt](const std::string&) { opt.seed_given = true; });

    CLI::App* train = app.add_subcommand("train", "train one classifier from a manifest");
    add_common(train);
    train->add_option("--manifest", opt.manifest, "train manifest");
    train->add_option("--classifier", opt.classifier,
                      "j48|random-forest|random-tree|mlp|naive-bayes|bayes-net");
    train->add_option("--model", opt.model_path, "output model path");
    train->add_option("--log", opt.log_path, "output training-log path");
    train->add_option("--seed", opt.seed, "training seed")->capture_default_str();
    train->add_option("--jobs", opt.jobs, "parallelism degree (0 = hardware)")
        ->capture_default_str();
    train->add_option("--confidence-factor", opt.confidence_factor, "J48 pruning confidence")
        ->capture_default_str();
    train->add_option("--min-leaf", opt.min_leaf, "J48 minimum instances per leaf")
        ->capture_default_str();
    train->add_option("--num-folds", opt.num_folds, "accepted for fidelity; inert")
        ->capture_default_str();
    train->add_flag("--unpruned", opt.unpruned, "disable J48 pruning");
    train->add_flag("--no-subtree-raising", opt.no_subtree_raising, "disable subtree raising");
    train->add_flag("--no-collapse", opt.no_collapse, "disable the collapse pass");
    train->add_flag("--gain-ratio", opt.gain_ratio, "select splits by gain ratio");
    train->add_option("--num-trees", opt.num_trees, "forest size")->capture_default_str();
    train->add_option("--m-tries", opt.m_tries, "features per node (0 = log2(F)+1)")
        ->capture_default_str();
    train->add_option("--min-gain", opt.min_gain, "minimum split gain (random trees/forest)")
        ->capture_default_str();
    train->add_option("--learning-rate", opt.learning_rate, "MLP learning rate")
        ->capture_default_str();
    train->add_option("--momentum", opt.momentum, "MLP momentum")->capture_default_str();
    train->add_option("--validation-threshold", opt.validation_threshold,
                      "consecutive degradations before early stop")
        ->capture_default_str();
    train->add_option("--validation-fraction", opt.validation_fraction,
                      "fraction held out for early stopping (0 disables)")
        ->capture_default_str();
    train->add_option("--epochs", opt.epochs, "MLP epoch cap")->capture_default_str();
    train->add_option("--hidden", opt.hidden, "MLP hidden units (0 = (N+C)/2)")
        ->capture_default_str();
    train->add_option("--nb-alpha", opt.nb_alpha, "Naive Bayes smoothing")->capture_default_str();
    train->add_option("--variance-floor", opt.variance_floor, "Gaussian variance floor")
        ->capture_default_str();
    train->add_option("--bn-alpha", opt.bn_alpha, "Bayes net simple-estimator alpha")
        ->capture_default_str();
    train->add_option("--max-parents", opt.max_parents, "K2 extra-parent budget")
        ->capture_default_str();
    train->add_option("--bins", opt.bins, "Bayes net equal-frequency bins")
        ->capture_default_str();

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a model on a test manifest");
    add_common(evaluate);
    evaluate->add_option("--model", opt.model_path, "model file");
    evaluate->add_option("--manifest", opt.manifest, "test manifest");
    evaluate->add_option("--report", opt.report_prefix, "report path prefix")
        ->capture_default_str();

    CLI::App* bench = app.add_subcommand("bench", "sample, train all six classifiers, evaluate, report");
    add_common(bench);
    bench->add_option("--plan", opt.plan_path, "sampling plan file")->capture_default_str();
    bench->add_option("--test-size", opt.test_size, "holdout size")->capture_default_str();
    bench->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    bench->add_option("--seed", opt.seed, "classifier seed (and plan-seed override)")
        ->trigger_on_parse()
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    bench->add_option("--jobs", opt.jobs, "parallelism degree")->capture_default_str();
    bench->add_option("--num-trees", opt.num_trees, "forest size")->capture_default_str();
    bench->add_option("--epochs", opt.epochs, "MLP epoch cap")->capture_default_str();
    bench->add_option("--hidden", opt.hidden, "MLP hidden units")->capture_default_str();
    bench->add_option("--validation-fraction", opt.validation_fraction,
                      "MLP early-stop fraction")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (count->parsed()) return cmd_count(opt);
        if (sample->parsed()) return cmd_sample(opt);
        if (train->parsed()) return cmd_train(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (bench->parsed()) return cmd_bench(opt);
        return kExitUsage;
    } catch (const kdd::ModelDigestError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDigest;
    } catch (const kdd::ModelIoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitParse;
    } catch (const kdd::RecordError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return kExitParse;
    } catch (const kdd::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return kExitParse;
    } catch (const kdd::PlanError& e) {
        std::fprintf(stderr, "plan error: %s\n", e.what());
        return kExitPlan;
    } catch (const kdd::TrainingError& e) {
        std::fprintf(stderr, "training error: %s\n", e.what());
        return kExitTraining;
    } catch (const kdd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const kdd::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMissingInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
