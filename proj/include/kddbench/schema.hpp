#pragma once

// KDD Cup 99 column schema. The 41 feature columns are data, not code: they
// are loaded from a schema file so the parser also works for NSL-KDD-format
// variants. The label column is implicit and always last.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kdd {

enum class ColumnKind : std::uint8_t { Numeric, Nominal };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> domain;  // nominal only, declared symbol order
};

class FeatureSchema {
public:
    static constexpr std::size_t kExpectedFeatureCount = 41;

    FeatureSchema() = default;
    explicit FeatureSchema(std::vector<Column> columns);

    const std::vector<Column>& columns() const { return columns_; }
    std::size_t feature_count() const { return columns_.size(); }
    std::size_t numeric_count() const { return numeric_slots_.size(); }
    std::size_t nominal_count() const { return nominal_slots_.size(); }

    // Dense slot of a feature within its kind (numeric slot or nominal slot).
    std::size_t slot_of(std::size_t feature) const { return slot_[feature]; }
    std::size_t numeric_feature(std::size_t slot) const { return numeric_slots_[slot]; }
    std::size_t nominal_feature(std::size_t slot) const { return nominal_slots_[slot]; }

    // Index of `symbol` in the declared domain of nominal feature `feature`,
    // or the reserved unseen index (== domain size) when not declared.
    std::int32_t symbol_index(std::size_t feature, std::string_view symbol) const;
    std::int32_t unseen_index(std::size_t feature) const {
        return static_cast<std::int32_t>(columns_[feature].domain.size());
    }

    // FNV-1a over the canonical text rendering; persisted models carry this so
    // a model cannot be evaluated against a different schema.
    std::uint64_t digest() const;
    std::string canonical_text() const;

private:
    std::vector<Column> columns_;
    std::vector<std::size_t> slot_;
    std::vector<std::size_t> numeric_slots_;
    std::vector<std::size_t> nominal_slots_;
    // per nominal feature: symbol -> index lookup, built once
    struct SymbolTable;
    std::vector<std::vector<std::pair<std::string, std::int32_t>>> lookup_;  // sorted
};

// Schema file grammar: one column per line,
//   <name>,<numeric|nominal>[,<symbol>;<symbol>;...]
// '#' comments and blank lines are skipped. Exactly 41 feature columns are
// required; the label column is not declared.
FeatureSchema load_schema(const std::string& path);

// Same grammar, from memory. `origin` names the source in error messages.
FeatureSchema parse_schema(std::string_view text, std::string_view origin = "<memory>");

// Test/support constructor that skips the 41-column arity check but keeps all
// other invariants (unique names, non-empty nominal domains).
FeatureSchema make_schema_unchecked(std::vector<Column> columns);

}  // namespace kdd
