#include "kddbench/trees.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "kddbench/error.hpp"
#include "kddbench/parallel.hpp"
#include "kddbench/rng.hpp"

namespace kdd {

namespace {

// Below this, a gain is treated as zero (floating-point noise floor).
constexpr double kTinyGain = 1e-12;

// Wichura's PPND16 (Algorithm AS 241): inverse of the standard normal CDF.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal quantile requires p in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = q < 0 ? p : 1 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                    3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                  4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                  2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                  5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0 ? -value : value;
}

struct SplitCandidate {
    bool valid = false;
    double criterion = -std::numeric_limits<double>::infinity();
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
};

struct GrowParams {
    std::uint32_t min_leaf = 2;
    double min_gain = kTinyGain;  // candidates with gain below this are rejected
    bool use_gain_ratio = false;
    std::uint32_t m_tries = 0;  // 0 == consider every feature
    Rng* rng = nullptr;         // required when m_tries > 0
};

class TreeGrower {
public:
    TreeGrower(const DataTable& data, const GrowParams& params)
        : data_(data), params_(params), class_count_(data.class_count()) {
        // c*log2(c) lookup; counts are integers so entropies become table sums.
        xlx_.resize(data.rows() + 1);
        for (std::size_t c = 1; c < xlx_.size(); ++c) {
            xlx_[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));
        }
        all_features_.resize(data.layout().feature_count());
        std::iota(all_features_.begin(), all_features_.end(), 0u);
    }

    Tree grow(std::vector<std::uint32_t> arena) {
        Tree tree;
        tree.layout = data_.layout();
        tree.class_count = class_count_;
        arena_ = std::move(arena);
        if (arena_.empty()) throw Error("cannot train a tree on an empty set");

        tree.nodes.emplace_back();
        struct Task {
            std::uint32_t node;
            std::size_t lo, hi;
        };
        std::vector<Task> stack{{0, 0, arena_.size()}};
        while (!stack.empty()) {
            const Task task = stack.back();
            stack.pop_back();
            process(tree, task.node, task.lo, task.hi, stack);
        }
        return tree;
    }

private:
    template <typename TaskVec>
    void process(Tree& tree, std::uint32_t node_id, std::size_t lo, std::size_t hi,
                 TaskVec& stack) {
        auto rows = std::span<std::uint32_t>(arena_).subspan(lo, hi - lo);
        auto& node = tree.nodes[node_id];
        node.counts.assign(static_cast<std::size_t>(class_count_), 0);
        for (std::uint32_t r : rows) ++node.counts[static_cast<std::size_t>(data_.classes()[r])];
        node.leaf_class = majority(node.counts);

        const std::uint32_t n = static_cast<std::uint32_t>(rows.size());
        const std::uint32_t max_count = node.counts[static_cast<std::size_t>(node.leaf_class)];
        if (max_count == n || n < 2 * params_.min_leaf) return;  // pure or too small

        const SplitCandidate best = best_split(rows);
        if (!best.valid) return;

        auto& mutable_node = tree.nodes[node_id];
        mutable_node.feature = best.feature;
        mutable_node.threshold = best.threshold;

        if (data_.layout().kinds[static_cast<std::size_t>(best.feature)] == ColumnKind::Numeric) {
            const auto& col = data_.numeric_column(data_.layout().slots[best.feature]);
            auto mid = std::partition(rows.begin(), rows.end(), [&](std::uint32_t r) {
                return col[r] <= best.threshold;
            });
            const std::size_t left_n = static_cast<std::size_t>(mid - rows.begin());
            const std::uint32_t left = new_node(tree);
            const std::uint32_t right = new_node(tree);
            tree.nodes[node_id].children = {left, right};
            stack.push_back({left, lo, lo + left_n});
            stack.push_back({right, lo + left_n, hi});
        } else {
            const std::size_t slot = data_.layout().slots[best.feature];
            const auto& col = data_.nominal_column(slot);
            const std::int32_t arity = data_.layout().nominal_arity[slot];
            // counting-sort rows into per-symbol groups, in place via scratch
            scratch_.assign(rows.begin(), rows.end());
            std::vector<std::size_t> offsets(static_cast<std::size_t>(arity) + 1, 0);
            for (std::uint32_t r : scratch_) ++offsets[static_cast<std::size_t>(col[r]) + 1];
            for (std::size_t s = 1; s < offsets.size(); ++s) offsets[s] += offsets[s - 1];
            std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
            for (std::uint32_t r : scratch_) rows[cursor[static_cast<std::size_t>(col[r])]++] = r;

            std::vector<std::uint32_t> children(static_cast<std::size_t>(arity));
            for (std::int32_t v = 0; v < arity; ++v) {
                children[static_cast<std::size_t>(v)] = new_node(tree);
            }
            tree.nodes[node_id].children = children;
            for (std::int32_t v = 0; v < arity; ++v) {
                const std::size_t clo = lo + offsets[static_cast<std::size_t>(v)];
                const std::size_t chi = lo + offsets[static_cast<std::size_t>(v) + 1];
                if (chi > clo) {
                    stack.push_back({children[static_cast<std::size_t>(v)], clo, chi});
                } else {
                    // empty branch: leaf predicting the parent majority
                    auto& leaf = tree.nodes[children[static_cast<std::size_t>(v)]];
                    leaf.counts.assign(static_cast<std::size_t>(class_count_), 0);
                    leaf.leaf_class = tree.nodes[node_id].leaf_class;
                }
            }
        }
    }

    static std::int32_t majority(const std::vector<std::uint32_t>& counts) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
            if (counts[c] > counts[best]) best = c;
        }
        return static_cast<std::int32_t>(best);
    }

    static std::uint32_t new_node(Tree& tree) {
        tree.nodes.emplace_back();
        return static_cast<std::uint32_t>(tree.nodes.size() - 1);
    }

    SplitCandidate best_split(std::span<const std::uint32_t> rows) {
        SplitCandidate best;
        std::span<const std::uint32_t> features;
        if (params_.m_tries == 0 || params_.m_tries >= all_features_.size()) {
            features = all_features_;
        } else {
            drawn_ = sample_without_replacement(std::span<const std::uint32_t>(all_features_),
                                                params_.m_tries, *params_.rng);
            std::sort(drawn_.begin(), drawn_.end());
            features = drawn_;
        }
        parent_counts_.assign(static_cast<std::size_t>(class_count_), 0);
        for (std::uint32_t r : rows) ++parent_counts_[static_cast<std::size_t>(data_.classes()[r])];
        double parent_sum = 0;
        for (std::uint32_t c : parent_counts_) parent_sum += xlx_[c];
        const double n = static_cast<double>(rows.size());
        const double parent_weighted_entropy = xlx_[rows.size()] - parent_sum;

        for (std::uint32_t f : features) {
            if (data_.layout().kinds[f] == ColumnKind::Numeric) {
                numeric_split(f, rows, parent_weighted_entropy, n, best);
            } else {
                nominal_split(f, rows, parent_weighted_entropy, n, best);
            }
        }
        return best;
    }

    void consider(SplitCandidate& best, double gain, double split_info, std::int32_t feature,
                  double threshold) {
        if (gain < params_.min_gain) return;
        const double criterion = params_.use_gain_ratio ? gain / split_info : gain;
        if (criterion > best.criterion) {
            best.valid = true;
            best.criterion = criterion;
            best.gain = gain;
            best.feature = feature;
            best.threshold = threshold;
        }
    }

    void numeric_split(std::uint32_t f, std::span<const std::uint32_t> rows,
                       double parent_weighted_entropy, double n, SplitCandidate& best) {
        const auto& col = data_.numeric_column(data_.layout().slots[f]);
        pairs_.resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            pairs_[i] = {col[rows[i]], data_.classes()[rows[i]]};
        }
        std::sort(pairs_.begin(), pairs_.end(),
                  [](const ValueClass& a, const ValueClass& b) { return a.value < b.value; });

        left_counts_.assign(static_cast<std::size_t>(class_count_), 0);
        double left_sum = 0;  // sum of xlx over left class counts
        std::uint32_t left_n = 0;
        const std::size_t total = rows.size();
        for (std::size_t i = 1; i < total; ++i) {
            const std::size_t cls = static_cast<std::size_t>(pairs_[i - 1].klass);
            left_sum -= xlx_[left_counts_[cls]];
            ++left_counts_[cls];
            left_sum += xlx_[left_counts_[cls]];
            ++left_n;
            if (pairs_[i].value == pairs_[i - 1].value) continue;
            const std::uint32_t right_n = static_cast<std::uint32_t>(total) - left_n;
            if (left_n < params_.min_leaf || right_n < params_.min_leaf) continue;

            const double left_we = xlx_[left_n] - left_sum;
            // right class sums derive from parent minus left
            double right_sum = 0;
            for (std::size_t c = 0; c < left_counts_.size(); ++c) {
                right_sum += xlx_[parent_counts_[c] - left_counts_[c]];
            }
            const double right_we = xlx_[right_n] - right_sum;
            const double gain = (parent_weighted_entropy - left_we - right_we) / n;
            if (gain < params_.min_gain) continue;

            // midpoint, guarded so the left test `value <= threshold` keeps
            // the sweep's partition even when the midpoint rounds up
            const double lo = pairs_[i - 1].value;
            const double hi = pairs_[i].value;
            double threshold = lo + (hi - lo) / 2;
            if (!(threshold < hi)) threshold = lo;
            const double split_info =
                (xlx_[total] - xlx_[left_n] - xlx_[right_n]) / n;
            consider(best, gain, split_info, static_cast<std::int32_t>(f), threshold);
        }
    }

    void nominal_split(std::uint32_t f, std::span<const std::uint32_t> rows,
                       double parent_weighted_entropy, double n, SplitCandidate& best) {
        const std::size_t slot = data_.layout().slots[f];
        const auto& col = data_.nominal_column(slot);
        const std::size_t arity = static_cast<std::size_t>(data_.layout().nominal_arity[slot]);
        nominal_counts_.assign(arity * static_cast<std::size_t>(class_count_), 0);
        nominal_totals_.assign(arity, 0);
        for (std::uint32_t r : rows) {
            const auto v = static_cast<std::size_t>(col[r]);
            ++nominal_counts_[v * static_cast<std::size_t>(class_count_) +
                              static_cast<std::size_t>(data_.classes()[r])];
            ++nominal_totals_[v];
        }
        std::uint32_t populated = 0;
        double children_weighted_entropy = 0;
        double split_info_sum = 0;
        for (std::size_t v = 0; v < arity; ++v) {
            if (nominal_totals_[v] == 0) continue;
            if (nominal_totals_[v] >= params_.min_leaf) ++populated;
            double s = 0;
            for (std::size_t c = 0; c < static_cast<std::size_t>(class_count_); ++c) {
                s += xlx_[nominal_counts_[v * static_cast<std::size_t>(class_count_) + c]];
            }
            children_weighted_entropy += xlx_[nominal_totals_[v]] - s;
            split_info_sum += xlx_[nominal_totals_[v]];
        }
        if (populated < 2) return;
        const double gain = (parent_weighted_entropy - children_weighted_entropy) / n;
        const double split_info = (xlx_[rows.size()] - split_info_sum) / n;
        consider(best, gain, split_info, static_cast<std::int32_t>(f), 0.0);
    }

    struct ValueClass {
        double value;
        std::int32_t klass;
    };

    const DataTable& data_;
    GrowParams params_;
    std::int32_t class_count_;
    std::vector<double> xlx_;
    std::vector<std::uint32_t> all_features_;
    std::vector<std::uint32_t> drawn_;
    std::vector<std::uint32_t> arena_;
    std::vector<std::uint32_t> scratch_;
    std::vector<ValueClass> pairs_;
    std::vector<std::uint32_t> parent_counts_;
    std::vector<std::uint32_t> left_counts_;
    std::vector<std::uint32_t> nominal_counts_;
    std::vector<std::uint32_t> nominal_totals_;
};

std::vector<std::uint32_t> iota_rows(std::size_t n) {
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0u);
    return rows;
}

// --- pruning -----------------------------------------------------------

class Pruner {
public:
    Pruner(Tree& tree, const DataTable& data, const DecisionTreeConfig& config)
        : tree_(tree), data_(data), config_(config) {}

    void run() {
        auto rows = iota_rows(data_.rows());
        if (config_.collapse) collapse(0);
        if (config_.pruned) prune(0, rows);
        compact();
    }

private:
    double training_errors(std::uint32_t node_id) const {
        const auto& node = tree_.nodes[node_id];
        if (node.is_leaf()) {
            return static_cast<double>(total_of(node) -
                                       node.counts[static_cast<std::size_t>(node.leaf_class)]);
        }
        double sum = 0;
        for (std::uint32_t child : node.children) sum += training_errors(child);
        return sum;
    }

    static std::uint64_t total_of(const TreeNode& node) {
        std::uint64_t t = 0;
        for (std::uint32_t c : node.counts) t += c;
        return t;
    }

    static std::int32_t majority(const std::vector<std::uint32_t>& counts) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < counts.size(); ++c) {
            if (counts[c] > counts[best]) best = c;
        }
        return static_cast<std::int32_t>(best);
    }

    void collapse(std::uint32_t node_id) {
        auto& node = tree_.nodes[node_id];
        if (node.is_leaf()) return;
        const double subtree = training_errors(node_id);
        const double as_leaf = static_cast<double>(
            total_of(node) - node.counts[static_cast<std::size_t>(node.leaf_class)]);
        if (subtree >= as_leaf - 1e-3) {
            node.feature = -1;
            node.children.clear();
        } else {
            for (std::uint32_t child : node.children) collapse(child);
        }
    }

    double pessimistic(double n, double e) const {
        if (n == 0) return 0;
        return e + add_errs(n, e, config_.confidence_factor);
    }

    double estimated_errors(std::uint32_t node_id) const {
        const auto& node = tree_.nodes[node_id];
        if (node.is_leaf()) {
            const double n = static_cast<double>(total_of(node));
            const double e =
                n - static_cast<double>(node.counts[static_cast<std::size_t>(node.leaf_class)]);
            return pessimistic(n, e);
        }
        double sum = 0;
        for (std::uint32_t child : node.children) sum += estimated_errors(child);
        return sum;
    }

    // Partition `rows` by the node's split, preserving relative order.
    std::vector<std::vector<std::uint32_t>> route(const TreeNode& node,
                                                  std::span<const std::uint32_t> rows) const {
        std::vector<std::vector<std::uint32_t>> groups(node.children.size());
        const std::size_t f = static_cast<std::size_t>(node.feature);
        if (data_.layout().kinds[f] == ColumnKind::Numeric) {
            const auto& col = data_.numeric_column(data_.layout().slots[f]);
            for (std::uint32_t r : rows) groups[col[r] <= node.threshold ? 0 : 1].push_back(r);
        } else {
            const auto& col = data_.nominal_column(data_.layout().slots[f]);
            for (std::uint32_t r : rows) groups[static_cast<std::size_t>(col[r])].push_back(r);
        }
        return groups;
    }

    std::vector<std::uint32_t> tally(std::span<const std::uint32_t> rows) const {
        std::vector<std::uint32_t> counts(static_cast<std::size_t>(tree_.class_count), 0);
        for (std::uint32_t r : rows) ++counts[static_cast<std::size_t>(data_.classes()[r])];
        return counts;
    }

    // Estimated errors of this subtree if it were fitted to `rows` instead of
    // its own coverage (leaf classes re-derived from the new majority).
    double errors_for_branch(std::uint32_t node_id, std::span<const std::uint32_t> rows) const {
        const auto& node = tree_.nodes[node_id];
        if (node.is_leaf()) {
            const auto counts = tally(rows);
            const double n = static_cast<double>(rows.size());
            const double e = n - static_cast<double>(counts[static_cast<std::size_t>(majority(counts))]);
            return pessimistic(n, e);
        }
        double sum = 0;
        const auto groups = route(node, rows);
        for (std::size_t k = 0; k < groups.size(); ++k) {
            sum += errors_for_branch(node.children[k], groups[k]);
        }
        return sum;
    }

    void recount(std::uint32_t node_id, std::span<const std::uint32_t> rows,
                 std::int32_t fallback_class) {
        auto& node = tree_.nodes[node_id];
        node.counts = tally(rows);
        node.leaf_class = rows.empty() ? fallback_class : majority(node.counts);
        if (node.is_leaf()) return;
        const auto groups = route(node, rows);
        const std::int32_t fallback = node.leaf_class;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            recount(node.children[k], groups[k], fallback);
        }
    }

    void prune(std::uint32_t node_id, std::span<const std::uint32_t> rows) {
        if (tree_.nodes[node_id].is_leaf()) return;
        {
            const auto groups = route(tree_.nodes[node_id], rows);
            const auto children = tree_.nodes[node_id].children;
            for (std::size_t k = 0; k < children.size(); ++k) prune(children[k], groups[k]);
        }

        auto& node = tree_.nodes[node_id];
        std::size_t largest = 0;
        std::uint64_t largest_total = 0;
        for (std::size_t k = 0; k < node.children.size(); ++k) {
            const std::uint64_t t = total_of(tree_.nodes[node.children[k]]);
            if (t > largest_total) {
                largest_total = t;
                largest = k;
            }
        }
        const double errors_leaf = pessimistic(
            static_cast<double>(total_of(node)),
            static_cast<double>(total_of(node) -
                                node.counts[static_cast<std::size_t>(node.leaf_class)]));
        const double errors_tree = estimated_errors(node_id);
        const double errors_branch =
            config_.subtree_raising ? errors_for_branch(node.children[largest], rows)
                                    : std::numeric_limits<double>::infinity();

        if (errors_leaf <= errors_tree + 0.1 && errors_leaf <= errors_branch + 0.1) {
            node.feature = -1;
            node.children.clear();
            return;
        }
        if (errors_branch <= errors_tree + 0.1) {
            // Raise the largest branch into this position and refit its
            // counts to the full coverage, then prune the raised subtree.
            const TreeNode branch = tree_.nodes[node.children[largest]];
            node.feature = branch.feature;
            node.threshold = branch.threshold;
            node.children = branch.children;
            recount(node_id, rows, node.leaf_class);
            prune(node_id, rows);
        }
    }

    // Drops nodes orphaned by pruning/raising; node 0 stays the root.
    void compact() {
        std::vector<TreeNode> packed;
        packed.reserve(tree_.nodes.size());
        packed.push_back(tree_.nodes[0]);
        std::vector<std::uint32_t> pending{0};
        while (!pending.empty()) {
            const std::uint32_t packed_id = pending.back();
            pending.pop_back();
            for (auto& child : packed[packed_id].children) {
                packed.push_back(tree_.nodes[child]);
                child = static_cast<std::uint32_t>(packed.size() - 1);
                pending.push_back(child);
            }
        }
        tree_.nodes = std::move(packed);
    }

    Tree& tree_;
    const DataTable& data_;
    const DecisionTreeConfig& config_;
};

}  // namespace

// --- public ops ---------------------------------------------------------

double ClassDistribution::total() const {
    double t = 0;
    for (double c : counts) t += c;
    return t;
}

double entropy(const ClassDistribution& dist) {
    const double total = dist.total();
    if (!(total > 0)) throw MetricError("entropy of an empty distribution");
    double h = 0;
    for (double c : dist.counts) {
        if (c > 0) {
            const double p = c / total;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double information_gain(const ClassDistribution& parent,
                        std::span<const ClassDistribution> children) {
    const double parent_total = parent.total();
    if (!(parent_total > 0)) throw MetricError("information gain of an empty parent");
    std::vector<double> sums(parent.counts.size(), 0.0);
    for (const auto& child : children) {
        if (child.counts.size() != parent.counts.size()) {
            throw MetricError("child class arity differs from parent");
        }
        for (std::size_t c = 0; c < sums.size(); ++c) sums[c] += child.counts[c];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (std::fabs(sums[c] - parent.counts[c]) > 1e-9) {
            throw MetricError("children counts do not sum to the parent's");
        }
    }
    double weighted = 0;
    for (const auto& child : children) {
        const double t = child.total();
        if (t > 0) weighted += (t / parent_total) * entropy(child);
    }
    return entropy(parent) - weighted;
}

std::int32_t Tree::predict_class(const RawInstance& instance) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        const std::size_t f = static_cast<std::size_t>(node->feature);
        const std::size_t slot = layout.slots[f];
        if (layout.kinds[f] == ColumnKind::Numeric) {
            node = &nodes[node->children[instance.numeric[slot] <= node->threshold ? 0 : 1]];
        } else {
            node = &nodes[node->children[static_cast<std::size_t>(instance.nominal[slot])]];
        }
    }
    return node->leaf_class;
}

void Tree::predict_distribution(const RawInstance& instance, std::vector<double>& out) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        const std::size_t f = static_cast<std::size_t>(node->feature);
        const std::size_t slot = layout.slots[f];
        if (layout.kinds[f] == ColumnKind::Numeric) {
            node = &nodes[node->children[instance.numeric[slot] <= node->threshold ? 0 : 1]];
        } else {
            node = &nodes[node->children[static_cast<std::size_t>(instance.nominal[slot])]];
        }
    }
    out.assign(static_cast<std::size_t>(class_count), 0.0);
    std::uint64_t total = 0;
    for (std::uint32_t c : node->counts) total += c;
    if (total == 0) {
        out[static_cast<std::size_t>(node->leaf_class)] = 1.0;
        return;
    }
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c] = static_cast<double>(node->counts[c]) / static_cast<double>(total);
    }
}

std::size_t Tree::leaf_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes) n += node.is_leaf() ? 1 : 0;
    return n;
}

std::uint32_t default_m_tries(std::size_t feature_count) {
    std::uint32_t m = 1;
    while ((feature_count >>= 1) != 0) ++m;
    return m;  // floor(log2 F) + 1
}

double add_errs(double n, double e, double cf) {
    if (cf > 0.5) throw ConfigError("confidence factor must be in (0, 0.5]");
    if (e < 1) {
        const double base = n * (1 - std::pow(cf, 1.0 / n));
        if (e == 0) return base;
        return base + e * (add_errs(n, 1, cf) - base);
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    const double z = normal_quantile(1 - cf);
    const double f = (e + 0.5) / n;
    const double r =
        (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) /
        (1 + z * z / n);
    return r * n - e;
}

DecisionTreeModel train_decision_tree(const DataTable& data, const DecisionTreeConfig& config) {
    if (data.rows() == 0) throw Error("cannot train a decision tree on an empty set");
    if (!(config.confidence_factor > 0 && config.confidence_factor <= 0.5)) {
        throw ConfigError("confidence factor must be in (0, 0.5]");
    }
    if (config.min_leaf < 1) throw ConfigError("min-leaf must be at least 1");
    GrowParams params;
    params.min_leaf = config.min_leaf;
    params.min_gain = kTinyGain;
    params.use_gain_ratio = config.use_gain_ratio;
    DecisionTreeModel model;
    model.config = config;
    model.tree = TreeGrower(data, params).grow(iota_rows(data.rows()));
    Pruner(model.tree, data, config).run();
    return model;
}

RandomTreeModel train_random_tree(const DataTable& data, const RandomTreeConfig& config) {
    if (data.rows() == 0) throw Error("cannot train a random tree on an empty set");
    const std::size_t feature_count = data.layout().feature_count();
    if (config.m_tries > feature_count) {
        throw ConfigError("m_tries exceeds the feature count");
    }
    RandomTreeConfig effective = config;
    if (effective.m_tries == 0) effective.m_tries = default_m_tries(feature_count);
    Rng rng(effective.seed);
    GrowParams params;
    params.min_leaf = effective.min_leaf;
    params.min_gain = std::max(effective.min_gain, kTinyGain);
    params.m_tries = effective.m_tries;
    params.rng = &rng;
    RandomTreeModel model;
    model.config = effective;
    model.tree = TreeGrower(data, params).grow(iota_rows(data.rows()));
    return model;
}

RandomForestModel train_random_forest(const DataTable& data, const ForestConfig& config) {
    if (data.rows() == 0) throw Error("cannot train a forest on an empty set");
    if (config.tree_count < 1) throw ConfigError("tree count must be at least 1");
    const std::size_t feature_count = data.layout().feature_count();
    if (config.m_tries > feature_count) throw ConfigError("m_tries exceeds the feature count");

    ForestConfig effective = config;
    if (effective.m_tries == 0) effective.m_tries = default_m_tries(feature_count);

    RandomForestModel model;
    model.config = effective;
    model.class_count = data.class_count();
    model.training_rows = data.rows();
    model.trees.resize(effective.tree_count);
    model.in_bag.resize(effective.tree_count);

    const std::size_t n = data.rows();
    const std::size_t words = (n + 63) / 64;
    parallel_for(effective.tree_count, effective.parallelism, [&](std::size_t t) {
        Rng rng(derive_seed(effective.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::uint32_t> bootstrap(n);
        auto& bag = model.in_bag[t];
        bag.assign(words, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = static_cast<std::uint32_t>(rng.bounded(n));
            bootstrap[i] = r;
            bag[r >> 6] |= 1ull << (r & 63);
        }
        GrowParams params;
        params.min_leaf = effective.min_leaf;
        params.min_gain = std::max(effective.min_gain, kTinyGain);
        params.m_tries = effective.m_tries;
        params.rng = &rng;
        model.trees[t] = TreeGrower(data, params).grow(std::move(bootstrap));
    });
    return model;
}

std::int32_t RandomForestModel::predict_class(const RawInstance& instance) const {
    std::vector<double> dist;
    predict_distribution(instance, dist);
    std::size_t best = 0;
    for (std::size_t c = 1; c < dist.size(); ++c) {
        if (dist[c] > dist[best]) best = c;
    }
    return static_cast<std::int32_t>(best);
}

void RandomForestModel::predict_distribution(const RawInstance& instance,
                                             std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(class_count), 0.0);
    for (const auto& tree : trees) {
        out[static_cast<std::size_t>(tree.predict_class(instance))] += 1.0;
    }
    for (double& v : out) v /= static_cast<double>(trees.size());
}

double oob_error(const RandomForestModel& model, const DataTable& training_data) {
    if (training_data.rows() != model.training_rows) {
        throw Error("out-of-bag error requires the original training table");
    }
    std::uint64_t counted = 0;
    std::uint64_t wrong = 0;
    std::vector<double> numeric_scratch;
    std::vector<std::int32_t> nominal_scratch;
    std::vector<std::uint32_t> votes(static_cast<std::size_t>(model.class_count));
    for (std::size_t r = 0; r < training_data.rows(); ++r) {
        votes.assign(votes.size(), 0);
        bool any = false;
        const RawInstance instance = training_data.row(r, numeric_scratch, nominal_scratch);
        for (std::size_t t = 0; t < model.trees.size(); ++t) {
            if (model.tree_used_row(t, r)) continue;
            ++votes[static_cast<std::size_t>(model.trees[t].predict_class(instance))];
            any = true;
        }
        if (!any) continue;  // record present in every bootstrap
        ++counted;
        std::size_t best = 0;
        for (std::size_t c = 1; c < votes.size(); ++c) {
            if (votes[c] > votes[best]) best = c;
        }
        if (static_cast<std::int32_t>(best) != training_data.classes()[r]) ++wrong;
    }
    if (counted == 0) throw MetricError("no record has an out-of-bag tree");
    return static_cast<double>(wrong) / static_cast<double>(counted);
}

namespace {

void render_node(const Tree& tree, std::uint32_t node_id, std::size_t depth,
                 std::span<const std::string> names, std::string& out) {
    const auto& node = tree.nodes[node_id];
    auto feature_name = [&](std::int32_t f) {
        if (static_cast<std::size_t>(f) < names.size()) return names[static_cast<std::size_t>(f)];
        return "f" + std::to_string(f);
    };
    auto indent = [&out](std::size_t d) { out.append(2 * d, ' '); };
    if (node.is_leaf()) {
        indent(depth);
        out += "leaf class=" + std::to_string(node.leaf_class) + " counts=[";
        for (std::size_t c = 0; c < node.counts.size(); ++c) {
            if (c > 0) out += ' ';
            out += std::to_string(node.counts[c]);
        }
        out += "]\n";
        return;
    }
    const std::size_t f = static_cast<std::size_t>(node.feature);
    if (tree.layout.kinds[f] == ColumnKind::Numeric) {
        char buf[32];
        const auto rc = std::to_chars(buf, buf + sizeof(buf), node.threshold);
        indent(depth);
        out += feature_name(node.feature) + " <= " + std::string(buf, rc.ptr) + "\n";
        render_node(tree, node.children[0], depth + 1, names, out);
        indent(depth);
        out += feature_name(node.feature) + " > " + std::string(buf, rc.ptr) + "\n";
        render_node(tree, node.children[1], depth + 1, names, out);
    } else {
        for (std::size_t v = 0; v < node.children.size(); ++v) {
            indent(depth);
            const bool unseen = v + 1 == node.children.size();
            out += feature_name(node.feature) + " = " +
                   (unseen ? "<unseen>" : std::to_string(v)) + "\n";
            render_node(tree, node.children[v], depth + 1, names, out);
        }
    }
}

}  // namespace

std::string render_tree(const Tree& tree, std::span<const std::string> feature_names) {
    std::string out;
    render_node(tree, 0, 0, feature_names, out);
    return out;
}

}  // namespace kdd
