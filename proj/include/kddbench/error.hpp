#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kdd {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed schema file or schema invariant violation (arity, duplicates).
struct SchemaError : Error {
    using Error::Error;
};

// A single corpus line failed to parse. Carries the 1-based line number.
struct RecordError : Error {
    RecordError(std::string message, std::uint64_t line)
        : Error(std::move(message)), line_number(line) {}
    std::uint64_t line_number = 0;
};

// Sampling plan cannot be satisfied. Carries the offending label, if any.
struct PlanError : Error {
    explicit PlanError(std::string message, std::string which = {})
        : Error(std::move(message)), label(std::move(which)) {}
    std::string label;
};

// Bad hyperparameter combination.
struct ConfigError : Error {
    using Error::Error;
};

// Training could not complete (e.g. divergence).
struct TrainingError : Error {
    using Error::Error;
};

// Metric is undefined for the given input (empty matrix, single-class AUC...).
struct MetricError : Error {
    using Error::Error;
};

// Model persistence failures, split by cause so callers can react.
struct ModelIoError : Error {
    using Error::Error;
};
struct ModelVersionError : ModelIoError {
    using ModelIoError::ModelIoError;
};
struct ModelTruncationError : ModelIoError {
    using ModelIoError::ModelIoError;
};
struct ModelDigestError : ModelIoError {
    using ModelIoError::ModelIoError;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace kdd
