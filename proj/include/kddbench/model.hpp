#pragma once

// The common classifier contract: one variant over the six model families,
// each carrying the encoder it was fitted with, plus versioned binary
// persistence. Trees predict from raw feature values; the MLP consumes the
// encoder's dense vectors; the Bayes family sees scaled numerics and raw
// nominal indices. A schema digest rides along so a model can never be
// evaluated against a mismatched schema.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kddbench/bayes.hpp"
#include "kddbench/encoder.hpp"
#include "kddbench/mlp.hpp"
#include "kddbench/record.hpp"
#include "kddbench/trees.hpp"

namespace kdd {

enum class ClassifierKind : std::uint32_t {
    J48 = 0,
    RandomTree = 1,
    RandomForest = 2,
    Mlp = 3,
    NaiveBayes = 4,
    BayesNet = 5,
};

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier(std::string_view name);

struct ModelInfo {
    ClassifierKind kind = ClassifierKind::J48;
    std::uint64_t seed = 1;
    std::uint64_t schema_digest = 0;
    std::map<std::string, std::string> hyperparameters;
};

struct TrainedModel {
    ModelInfo info;
    Encoder encoder;
    std::vector<std::string> class_labels;  // fixed category order
    std::variant<DecisionTreeModel, RandomTreeModel, RandomForestModel, MlpModel,
                 NaiveBayesModel, BayesNetModel>
        impl;

    // Always a valid probability vector (non-negative, unit sum).
    void predict_distribution(const RawInstance& instance, std::vector<double>& out) const;
    std::int32_t predict_class(const RawInstance& instance) const;
    std::int32_t class_count() const;
};

// Versioned binary container: magic, format version, schema digest, model
// kind, payload. Doubles are stored as IEEE-754 bit patterns, so a loaded
// model predicts bit-identically. docs/model_format.md describes the layout.
void save_model(const TrainedModel& model, const std::string& path);

// Throws ModelVersionError / ModelTruncationError / ModelDigestError as
// appropriate; with `expected_digest`, the stored digest must match.
TrainedModel load_model(const std::string& path,
                        std::optional<std::uint64_t> expected_digest = std::nullopt);

}  // namespace kdd
