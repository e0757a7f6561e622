#include "kddbench/model.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include "kddbench/error.hpp"
#include "kddbench/metrics.hpp"

namespace kdd {

namespace {

constexpr char kMagic[4] = {'K', 'D', 'B', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : file_(std::fopen(path.c_str(), "wb")) {
        if (!file_) throw IoError("cannot write model file: " + path);
    }
    ~Writer() {
        if (file_) std::fclose(file_);
    }
    void close() {
        if (std::fclose(file_) != 0) throw IoError("short write closing model file");
        file_ = nullptr;
    }

    void bytes(const void* data, std::size_t n) {
        if (std::fwrite(data, 1, n, file_) != n) throw IoError("short write to model file");
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                             static_cast<std::uint8_t>(v >> 16),
                             static_cast<std::uint8_t>(v >> 24)};
        bytes(b, 4);
    }
    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v));
        u32(static_cast<std::uint32_t>(v >> 32));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
    template <typename T, typename Fn>
    void vec(const std::vector<T>& v, Fn&& each) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (const auto& e : v) each(e);
    }

private:
    std::FILE* file_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
        if (!file_) throw IoError("cannot open model file: " + path);
    }
    ~Reader() {
        if (file_) std::fclose(file_);
    }

    void bytes(void* out, std::size_t n) {
        if (std::fread(out, 1, n, file_) != n) {
            throw ModelTruncationError("model file is truncated");
        }
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::uint64_t u64() {
        const std::uint64_t lo = u32();
        return lo | (static_cast<std::uint64_t>(u32()) << 32);
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        std::string s(checked_count(u32(), 1), '\0');
        bytes(s.data(), s.size());
        return s;
    }
    template <typename T, typename Fn>
    std::vector<T> vec(Fn&& each) {
        std::vector<T> v(checked_count(u32(), sizeof(T) >= 4 ? 4 : 1));
        for (auto& e : v) e = each();
        return v;
    }
    bool at_eof() {
        std::uint8_t probe;
        return std::fread(&probe, 1, 1, file_) == 0;
    }

    // Guards against counted reads larger than the file itself.
    std::size_t checked_count(std::uint32_t n, std::size_t element_size) {
        if (remaining_ == 0) {
            const long pos = std::ftell(file_);
            std::fseek(file_, 0, SEEK_END);
            remaining_ = static_cast<std::size_t>(std::ftell(file_));
            std::fseek(file_, pos, SEEK_SET);
        }
        if (static_cast<std::size_t>(n) * element_size > remaining_) {
            throw ModelTruncationError("model file is truncated");
        }
        return n;
    }

private:
    std::FILE* file_;
    std::size_t remaining_ = 0;
};

}  // namespace

// Serialization of encoder internals lives here rather than in encoder.cpp;
// the codec is the single place that knows the byte layout.
struct ModelCodec {
    static void write_layout(Writer& w, const FeatureLayout& layout) {
        w.u32(static_cast<std::uint32_t>(layout.kinds.size()));
        for (ColumnKind k : layout.kinds) w.u8(static_cast<std::uint8_t>(k));
        for (std::uint32_t s : layout.slots) w.u32(s);
        w.vec(layout.nominal_arity, [&](std::int32_t a) { w.i32(a); });
        w.u32(layout.numeric_count);
    }
    static FeatureLayout read_layout(Reader& r) {
        FeatureLayout layout;
        const std::uint32_t features = r.u32();
        layout.kinds.resize(r.checked_count(features, 1));
        for (auto& k : layout.kinds) k = static_cast<ColumnKind>(r.u8());
        layout.slots.resize(features);
        for (auto& s : layout.slots) s = r.u32();
        layout.nominal_arity = r.vec<std::int32_t>([&] { return r.i32(); });
        layout.numeric_count = r.u32();
        return layout;
    }

    static void write_encoder(Writer& w, const Encoder& e) {
        write_layout(w, e.layout_);
        w.vec(e.min_, [&](double v) { w.f64(v); });
        w.vec(e.span_, [&](double v) { w.f64(v); });
        w.u64(e.encoded_size_);
    }
    static Encoder read_encoder(Reader& r) {
        Encoder e;
        e.layout_ = read_layout(r);
        e.min_ = r.vec<double>([&] { return r.f64(); });
        e.span_ = r.vec<double>([&] { return r.f64(); });
        e.encoded_size_ = r.u64();
        return e;
    }

    static void write_tree(Writer& w, const Tree& tree) {
        write_layout(w, tree.layout);
        w.i32(tree.class_count);
        w.vec(tree.nodes, [&](const TreeNode& node) {
            w.i32(node.feature);
            w.f64(node.threshold);
            w.vec(node.children, [&](std::uint32_t c) { w.u32(c); });
            w.vec(node.counts, [&](std::uint32_t c) { w.u32(c); });
            w.i32(node.leaf_class);
        });
    }
    static Tree read_tree(Reader& r) {
        Tree tree;
        tree.layout = read_layout(r);
        tree.class_count = r.i32();
        tree.nodes = r.vec<TreeNode>([&] {
            TreeNode node;
            node.feature = r.i32();
            node.threshold = r.f64();
            node.children = r.vec<std::uint32_t>([&] { return r.u32(); });
            node.counts = r.vec<std::uint32_t>([&] { return r.u32(); });
            node.leaf_class = r.i32();
            return node;
        });
        return tree;
    }
};

namespace {

void write_payload(Writer& w, const DecisionTreeModel& m) {
    w.f64(m.config.confidence_factor);
    w.u32(m.config.min_leaf);
    w.u8(m.config.pruned);
    w.u8(m.config.subtree_raising);
    w.u8(m.config.collapse);
    w.u8(m.config.use_gain_ratio);
    w.u32(m.config.num_folds);
    ModelCodec::write_tree(w, m.tree);
}
DecisionTreeModel read_j48(Reader& r) {
    DecisionTreeModel m;
    m.config.confidence_factor = r.f64();
    m.config.min_leaf = r.u32();
    m.config.pruned = r.u8() != 0;
    m.config.subtree_raising = r.u8() != 0;
    m.config.collapse = r.u8() != 0;
    m.config.use_gain_ratio = r.u8() != 0;
    m.config.num_folds = r.u32();
    m.tree = ModelCodec::read_tree(r);
    return m;
}

void write_payload(Writer& w, const RandomTreeModel& m) {
    w.u32(m.config.m_tries);
    w.f64(m.config.min_gain);
    w.u64(m.config.seed);
    w.u32(m.config.min_leaf);
    ModelCodec::write_tree(w, m.tree);
}
RandomTreeModel read_random_tree(Reader& r) {
    RandomTreeModel m;
    m.config.m_tries = r.u32();
    m.config.min_gain = r.f64();
    m.config.seed = r.u64();
    m.config.min_leaf = r.u32();
    m.tree = ModelCodec::read_tree(r);
    return m;
}

void write_payload(Writer& w, const RandomForestModel& m) {
    // `parallelism` is a runtime knob, not part of the model: files must be
    // byte-identical regardless of the training thread count.
    w.u32(m.config.tree_count);
    w.u32(m.config.m_tries);
    w.u64(m.config.seed);
    w.f64(m.config.min_gain);
    w.u32(m.config.min_leaf);
    w.i32(m.class_count);
    w.u64(m.training_rows);
    w.vec(m.trees, [&](const Tree& t) { ModelCodec::write_tree(w, t); });
    w.vec(m.in_bag, [&](const std::vector<std::uint64_t>& bag) {
        w.vec(bag, [&](std::uint64_t word) { w.u64(word); });
    });
}
RandomForestModel read_forest(Reader& r) {
    RandomForestModel m;
    m.config.tree_count = r.u32();
    m.config.m_tries = r.u32();
    m.config.seed = r.u64();
    m.config.min_gain = r.f64();
    m.config.min_leaf = r.u32();
    m.class_count = r.i32();
    m.training_rows = r.u64();
    m.trees = r.vec<Tree>([&] { return ModelCodec::read_tree(r); });
    m.in_bag = r.vec<std::vector<std::uint64_t>>(
        [&] { return r.vec<std::uint64_t>([&] { return r.u64(); }); });
    return m;
}

void write_payload(Writer& w, const MlpModel& m) {
    w.u32(m.topology.inputs);
    w.u32(m.topology.hidden);
    w.u32(m.topology.outputs);
    w.u8(static_cast<std::uint8_t>(m.topology.output_activation));
    w.vec(m.hidden_weights, [&](double v) { w.f64(v); });
    w.vec(m.output_weights, [&](double v) { w.f64(v); });
}
MlpModel read_mlp(Reader& r) {
    MlpModel m;
    m.topology.inputs = r.u32();
    m.topology.hidden = r.u32();
    m.topology.outputs = r.u32();
    m.topology.output_activation = static_cast<Activation>(r.u8());
    m.hidden_weights = r.vec<double>([&] { return r.f64(); });
    m.output_weights = r.vec<double>([&] { return r.f64(); });
    return m;
}

void write_payload(Writer& w, const NaiveBayesModel& m) {
    ModelCodec::write_layout(w, m.layout);
    w.i32(m.class_count);
    w.f64(m.alpha);
    w.f64(m.variance_floor);
    w.vec(m.priors, [&](double v) { w.f64(v); });
    w.vec(m.nominal_log_likelihood,
          [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
    w.vec(m.means, [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
    w.vec(m.variances,
          [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
}
NaiveBayesModel read_naive_bayes(Reader& r) {
    NaiveBayesModel m;
    m.layout = ModelCodec::read_layout(r);
    m.class_count = r.i32();
    m.alpha = r.f64();
    m.variance_floor = r.f64();
    auto doubles = [&] { return r.f64(); };
    m.priors = r.vec<double>(doubles);
    m.nominal_log_likelihood =
        r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    m.means = r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    m.variances = r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    return m;
}

void write_payload(Writer& w, const BayesNetModel& m) {
    ModelCodec::write_layout(w, m.layout);
    w.i32(m.class_count);
    w.f64(m.config.alpha);
    w.u32(m.config.max_parents);
    w.u32(m.config.numeric_bins);
    w.vec(m.priors, [&](double v) { w.f64(v); });
    w.vec(m.cutpoints,
          [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
    w.vec(m.arity, [&](std::int32_t a) { w.i32(a); });
    w.vec(m.parents,
          [&](const std::vector<std::int32_t>& t) { w.vec(t, [&](std::int32_t v) { w.i32(v); }); });
    w.vec(m.cpt, [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
    w.vec(m.score_trace,
          [&](const std::vector<double>& t) { w.vec(t, [&](double v) { w.f64(v); }); });
}
BayesNetModel read_bayes_net(Reader& r) {
    BayesNetModel m;
    m.layout = ModelCodec::read_layout(r);
    m.class_count = r.i32();
    m.config.alpha = r.f64();
    m.config.max_parents = r.u32();
    m.config.numeric_bins = r.u32();
    auto doubles = [&] { return r.f64(); };
    m.priors = r.vec<double>(doubles);
    m.cutpoints = r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    m.arity = r.vec<std::int32_t>([&] { return r.i32(); });
    m.parents = r.vec<std::vector<std::int32_t>>(
        [&] { return r.vec<std::int32_t>([&] { return r.i32(); }); });
    m.cpt = r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    m.score_trace = r.vec<std::vector<double>>([&] { return r.vec<double>(doubles); });
    return m;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::J48: return "j48";
        case ClassifierKind::RandomTree: return "random-tree";
        case ClassifierKind::RandomForest: return "random-forest";
        case ClassifierKind::Mlp: return "mlp";
        case ClassifierKind::NaiveBayes: return "naive-bayes";
        case ClassifierKind::BayesNet: return "bayes-net";
    }
    return "unknown";
}

std::optional<ClassifierKind> parse_classifier(std::string_view name) {
    for (auto kind : {ClassifierKind::J48, ClassifierKind::RandomTree,
                      ClassifierKind::RandomForest, ClassifierKind::Mlp,
                      ClassifierKind::NaiveBayes, ClassifierKind::BayesNet}) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

void TrainedModel::predict_distribution(const RawInstance& instance,
                                        std::vector<double>& out) const {
    struct Visitor {
        const TrainedModel& model;
        const RawInstance& instance;
        std::vector<double>& out;

        void operator()(const DecisionTreeModel& m) { m.tree.predict_distribution(instance, out); }
        void operator()(const RandomTreeModel& m) { m.tree.predict_distribution(instance, out); }
        void operator()(const RandomForestModel& m) { m.predict_distribution(instance, out); }
        void operator()(const MlpModel& m) {
            const auto encoded = model.encoder.transform(instance);
            out = forward(m, encoded).probabilities;
        }
        void operator()(const NaiveBayesModel& m) { out = posterior(m, scaled()); }
        void operator()(const BayesNetModel& m) { out = posterior(m, scaled()); }

        std::vector<double> scaled_numeric;
        RawInstance scaled() {
            scaled_numeric.resize(instance.numeric.size());
            for (std::size_t s = 0; s < instance.numeric.size(); ++s) {
                scaled_numeric[s] = model.encoder.scale_numeric(instance.numeric[s], s);
            }
            return RawInstance{scaled_numeric, instance.nominal};
        }
    } visitor{*this, instance, out, {}};
    std::visit(visitor, impl);
}

std::int32_t TrainedModel::predict_class(const RawInstance& instance) const {
    std::vector<double> dist;
    predict_distribution(instance, dist);
    return argmax_lowest(dist);
}

std::int32_t TrainedModel::class_count() const {
    return static_cast<std::int32_t>(class_labels.size());
}

void save_model(const TrainedModel& model, const std::string& path) {
    Writer w(path);
    w.bytes(kMagic, 4);
    w.u32(kFormatVersion);
    w.u64(model.info.schema_digest);
    w.u32(static_cast<std::uint32_t>(model.info.kind));
    w.u64(model.info.seed);
    w.u32(static_cast<std::uint32_t>(model.info.hyperparameters.size()));
    for (const auto& [key, value] : model.info.hyperparameters) {
        w.str(key);
        w.str(value);
    }
    w.vec(model.class_labels, [&](const std::string& s) { w.str(s); });
    ModelCodec::write_encoder(w, model.encoder);
    std::visit([&w](const auto& payload) { write_payload(w, payload); }, model.impl);
    w.close();
}

TrainedModel load_model(const std::string& path, std::optional<std::uint64_t> expected_digest) {
    Reader r(path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw ModelIoError("not a model file (bad magic): " + path);
    }
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw ModelVersionError("unsupported model format version " + std::to_string(version));
    }
    TrainedModel model;
    model.info.schema_digest = r.u64();
    if (expected_digest && *expected_digest != model.info.schema_digest) {
        throw ModelDigestError("model was trained against a different schema");
    }
    const std::uint32_t kind = r.u32();
    if (kind > static_cast<std::uint32_t>(ClassifierKind::BayesNet)) {
        throw ModelIoError("unknown classifier tag " + std::to_string(kind));
    }
    model.info.kind = static_cast<ClassifierKind>(kind);
    model.info.seed = r.u64();
    const std::uint32_t params = r.u32();
    for (std::uint32_t i = 0; i < params; ++i) {
        auto key = r.str();
        model.info.hyperparameters[std::move(key)] = r.str();
    }
    model.class_labels = r.vec<std::string>([&] { return r.str(); });
    model.encoder = ModelCodec::read_encoder(r);
    switch (model.info.kind) {
        case ClassifierKind::J48: model.impl = read_j48(r); break;
        case ClassifierKind::RandomTree: model.impl = read_random_tree(r); break;
        case ClassifierKind::RandomForest: model.impl = read_forest(r); break;
        case ClassifierKind::Mlp: model.impl = read_mlp(r); break;
        case ClassifierKind::NaiveBayes: model.impl = read_naive_bayes(r); break;
        case ClassifierKind::BayesNet: model.impl = read_bayes_net(r); break;
    }
    if (!r.at_eof()) throw ModelIoError("trailing bytes after model payload");
    return model;
}

}  // namespace kdd
