#pragma once

// Feature encoding fitted on training data only: numerics min-max scaled to
// [0,1] over the training range (no clamping, so out-of-range test values
// scale past the unit interval), nominals one-hot with the unseen index
// encoding as an all-zero group.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kddbench/data_table.hpp"
#include "kddbench/record.hpp"

namespace kdd {

class Encoder {
public:
    Encoder() = default;

    // Ranges from training rows only. Constant columns are widened to
    // (min, min+1) so their scaled value is exactly 0.
    static Encoder fit(const DataTable& training);

    // Scaled numeric value of numeric slot `s`.
    double scale_numeric(double value, std::size_t s) const {
        return (value - min_[s]) / span_[s];
    }

    // Dense vector: scaled numerics then one-hot groups (group width equals
    // the declared domain size; the unseen index encodes as all zeros).
    void transform(const RawInstance& instance, std::vector<double>& out) const;
    std::vector<double> transform(const RawInstance& instance) const;

    std::size_t encoded_size() const { return encoded_size_; }
    std::size_t numeric_count() const { return min_.size(); }
    const std::vector<double>& minima() const { return min_; }
    const std::vector<double>& spans() const { return span_; }
    const FeatureLayout& layout() const { return layout_; }

    // Persistence hooks; byte-exact round trip.
    friend struct ModelCodec;

private:
    FeatureLayout layout_;
    std::vector<double> min_;   // per numeric slot
    std::vector<double> span_;  // max - min, or 1 for constant columns
    std::size_t encoded_size_ = 0;
};

// Applies the encoder's numeric scaling to a raw table, leaving nominal
// columns as symbol indices. This is the input the Bayes-family models train
// on; trees keep using the raw table.
DataTable scale_numeric_columns(const DataTable& raw, const Encoder& encoder);

}  // namespace kdd
