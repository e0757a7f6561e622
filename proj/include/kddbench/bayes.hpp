#pragma once

// Bayesian classifiers. Naive Bayes keeps smoothed frequency tables for
// nominal features and per-class Gaussians for numeric ones; the Bayes
// network discretizes numerics into equal-frequency bins, always keeps the
// class as a parent of every feature, and lets a K2 search add a bounded
// number of extra parents scored by the Bayesian marginal likelihood.
// All probability arithmetic is done in log space; only the final
// normalization exponentiates.

#include <cstdint>
#include <span>
#include <vector>

#include "kddbench/data_table.hpp"
#include "kddbench/record.hpp"

namespace kdd {

struct NaiveBayesModel {
    FeatureLayout layout;
    std::int32_t class_count = 0;
    double alpha = 1.0;
    double variance_floor = 1e-9;
    std::vector<double> priors;  // relative class frequencies (may contain zeros)
    // per nominal slot: log p(value | class), laid out [class * arity + value]
    std::vector<std::vector<double>> nominal_log_likelihood;
    // per numeric slot: per-class Gaussian parameters
    std::vector<std::vector<double>> means;      // [slot][class]
    std::vector<std::vector<double>> variances;  // [slot][class], floored
};

// Priors are plain class frequencies; nominal likelihoods are add-alpha
// smoothed over the declared domain plus the unseen index; numeric
// likelihoods are Gaussian with a variance floor.
NaiveBayesModel train_naive_bayes(const DataTable& data, double alpha = 1.0,
                                  double variance_floor = 1e-9);

std::vector<double> posterior(const NaiveBayesModel& model, const RawInstance& instance);

// Prior correction: p'(y|x) proportional to p_bal(y|x) / p_bal(y) * p_true(y).
std::vector<double> rebalance_posterior(std::span<const double> balanced_posterior,
                                        std::span<const double> balanced_priors,
                                        std::span<const double> true_priors);

// Combines per-feature-group posteriors that share `priors`, under
// conditional independence of the groups. Equals a single model on the
// concatenated features when the groups are disjoint.
std::vector<double> combine_posteriors(std::span<const std::vector<double>> group_posteriors,
                                       std::span<const double> priors);

struct BayesNetConfig {
    double alpha = 0.5;             // simple-estimator smoothing for CPTs and scores
    std::uint32_t max_parents = 1;  // extra parents per feature beyond the class
    std::uint32_t numeric_bins = 10;
};

struct BayesNetModel {
    FeatureLayout layout;
    std::int32_t class_count = 0;
    BayesNetConfig config;
    std::vector<double> priors;  // class node, relative frequencies
    // Equal-frequency cutpoints per numeric slot; bin(x) counts cuts < x, so
    // a value equal to a cut falls in the lower bin.
    std::vector<std::vector<double>> cutpoints;
    std::vector<std::int32_t> arity;                 // per feature (bins or domain+1)
    std::vector<std::vector<std::int32_t>> parents;  // extra parents per feature, ascending
    // log CPTs per feature, indexed [((class * a_p1 + v_p1) * ...) * a_f + v_f]
    std::vector<std::vector<double>> cpt;
    // Accepted K2 scores per feature, starting score first; strictly
    // increasing by construction.
    std::vector<std::vector<double>> score_trace;

    std::int32_t discrete_value(std::size_t feature, const RawInstance& instance) const;
};

BayesNetModel train_bayes_net(const DataTable& data, const BayesNetConfig& config = {});

std::vector<double> posterior(const BayesNetModel& model, const RawInstance& instance);

// `node <- parents` list plus CPT rows, for golden-file tests.
std::string render_network(const BayesNetModel& model);

// Replaces numeric columns by their equal-frequency bin index (as additional
// nominal columns, declared arity = bin count). Used by the network trainer
// and by tests that need "the same discretization" on both sides.
DataTable discretize_numeric_columns(const DataTable& data, std::uint32_t bins,
                                     std::vector<std::vector<double>>* cutpoints_out = nullptr);

}  // namespace kdd
