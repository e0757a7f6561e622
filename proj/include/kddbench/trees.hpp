#pragma once

// Decision-tree machinery: entropy and information gain, a C4.5-style pruned
// tree, an unpruned random tree with per-node feature subsampling, and a
// bagged forest with majority voting and out-of-bag error.
//
// Determinism contract: every tie is broken the same way everywhere --
// lowest feature index, then lowest threshold, and majority-vote ties go to
// the lowest class index. Fixed seeds therefore give bit-identical trees.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kddbench/data_table.hpp"
#include "kddbench/record.hpp"

namespace kdd {

struct ClassDistribution {
    std::vector<double> counts;

    double total() const;
};

// Eq.-style Shannon entropy in bits, with 0*log(0) == 0.
double entropy(const ClassDistribution& dist);

// entropy(parent) - sum over children of (n_child/n_parent) * entropy(child).
// Children must partition the parent's counts class-by-class.
double information_gain(const ClassDistribution& parent,
                        std::span<const ClassDistribution> children);

// Flat tree arena. nodes[0] is the root. Numeric splits send value <=
// threshold to children[0]; nominal splits have one child per symbol plus an
// unseen child (arity entries). Every node keeps its training class counts;
// leaf_class is the majority with lowest-index tie-break.
struct TreeNode {
    std::int32_t feature = -1;  // -1 == leaf
    double threshold = 0.0;
    std::vector<std::uint32_t> children;
    std::vector<std::uint32_t> counts;
    std::int32_t leaf_class = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    FeatureLayout layout;
    std::int32_t class_count = 0;
    std::vector<TreeNode> nodes;

    std::int32_t predict_class(const RawInstance& instance) const;
    void predict_distribution(const RawInstance& instance, std::vector<double>& out) const;
    std::size_t leaf_count() const;
    bool operator==(const Tree&) const = default;
};

struct DecisionTreeConfig {
    double confidence_factor = 0.25;
    std::uint32_t min_leaf = 2;
    bool pruned = true;
    bool subtree_raising = true;
    bool collapse = true;
    bool use_gain_ratio = false;  // selection criterion; gain must be positive either way
    std::uint32_t num_folds = 3;  // accepted for interface fidelity; inert under pessimistic pruning
};

struct RandomTreeConfig {
    std::uint32_t m_tries = 0;  // 0 selects floor(log2 F) + 1
    double min_gain = 0.001;
    std::uint64_t seed = 1;
    std::uint32_t min_leaf = 1;
};

struct ForestConfig {
    std::uint32_t tree_count = 100;
    std::uint32_t m_tries = 0;  // 0 selects floor(log2 F) + 1
    std::uint64_t seed = 1;
    double min_gain = 0.001;
    std::uint32_t min_leaf = 1;
    std::uint32_t parallelism = 0;  // 0 selects hardware concurrency
};

struct DecisionTreeModel {
    Tree tree;
    DecisionTreeConfig config;
};

struct RandomTreeModel {
    Tree tree;
    RandomTreeConfig config;
};

struct RandomForestModel {
    std::vector<Tree> trees;
    // Packed per-tree bootstrap membership over the training rows, kept for
    // out-of-bag error.
    std::vector<std::vector<std::uint64_t>> in_bag;
    std::uint64_t training_rows = 0;
    ForestConfig config;
    std::int32_t class_count = 0;

    bool tree_used_row(std::size_t tree, std::size_t row) const {
        return (in_bag[tree][row >> 6] >> (row & 63)) & 1u;
    }
    std::int32_t predict_class(const RawInstance& instance) const;
    void predict_distribution(const RawInstance& instance, std::vector<double>& out) const;
};

DecisionTreeModel train_decision_tree(const DataTable& data, const DecisionTreeConfig& config);
RandomTreeModel train_random_tree(const DataTable& data, const RandomTreeConfig& config);
RandomForestModel train_random_forest(const DataTable& data, const ForestConfig& config);

// Majority vote restricted, per record, to trees whose bootstrap excluded it;
// records in every bootstrap leave the denominator. Throws MetricError when
// no record has an out-of-bag tree.
double oob_error(const RandomForestModel& model, const DataTable& training_data);

std::uint32_t default_m_tries(std::size_t feature_count);

// Extra errors added to e by the one-tailed upper confidence bound of the
// binomial at confidence cf; the C4.5 pessimistic-error estimate for a leaf
// is e + add_errs(n, e, cf).
double add_errs(double n, double e, double cf);

// Indented text rendering of splits and leaf distributions, for inspection
// and golden tests.
std::string render_tree(const Tree& tree, std::span<const std::string> feature_names = {});

}  // namespace kdd
