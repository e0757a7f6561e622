#pragma once

// Column-oriented training data. Classifiers train against this instead of
// record vectors: tree induction sweeps columns, Bayes tallies columns, and
// the encoder fits ranges per column, so the layout matches the access
// pattern. Rows keep raw values; scaling happens in the encoder.

#include <cstdint>
#include <string>
#include <vector>

#include "kddbench/record.hpp"
#include "kddbench/schema.hpp"
#include "kddbench/taxonomy.hpp"

namespace kdd {

// Per-feature kind/slot map shared by tables and trained models. `arity` for
// a nominal slot includes the reserved unseen index.
struct FeatureLayout {
    std::vector<ColumnKind> kinds;        // by global feature index
    std::vector<std::uint32_t> slots;     // dense slot within the kind
    std::vector<std::int32_t> nominal_arity;  // by nominal slot
    std::uint32_t numeric_count = 0;

    std::size_t feature_count() const { return kinds.size(); }
    std::size_t nominal_count() const { return nominal_arity.size(); }
    bool operator==(const FeatureLayout&) const = default;
};

FeatureLayout layout_from_schema(const FeatureSchema& schema);

class DataTable {
public:
    DataTable() = default;
    DataTable(FeatureLayout layout, std::int32_t class_count);

    // Appends one labelled instance. Nominal values must be < arity.
    void add_row(const RawInstance& values, std::int32_t klass);

    std::size_t rows() const { return klass_.size(); }
    std::int32_t class_count() const { return class_count_; }
    const FeatureLayout& layout() const { return layout_; }

    const std::vector<double>& numeric_column(std::size_t slot) const { return numeric_[slot]; }
    const std::vector<std::int32_t>& nominal_column(std::size_t slot) const {
        return nominal_[slot];
    }
    const std::vector<std::int32_t>& classes() const { return klass_; }

    // Value of global feature `f` for row `i`.
    double numeric_at(std::size_t f, std::size_t i) const {
        return numeric_[layout_.slots[f]][i];
    }
    std::int32_t nominal_at(std::size_t f, std::size_t i) const {
        return nominal_[layout_.slots[f]][i];
    }

    // Copies row `i` into the caller's scratch buffers and returns a view.
    RawInstance row(std::size_t i, std::vector<double>& numeric_scratch,
                    std::vector<std::int32_t>& nominal_scratch) const;

private:
    FeatureLayout layout_;
    std::int32_t class_count_ = 0;
    std::vector<std::vector<double>> numeric_;
    std::vector<std::vector<std::int32_t>> nominal_;
    std::vector<std::int32_t> klass_;
};

struct TableBuildStats {
    std::uint64_t rows = 0;
    std::uint64_t skipped_unknown_category = 0;
};

// Builds a 5-class table from parsed records; rows whose label falls outside
// the taxonomy are skipped and counted.
DataTable build_table(const std::vector<ConnectionRecord>& records, const FeatureSchema& schema,
                      const AttackTaxonomy& taxonomy, TableBuildStats* stats = nullptr);

}  // namespace kdd
