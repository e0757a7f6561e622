#include "kddbench/data_table.hpp"

#include <cassert>

#include "kddbench/error.hpp"

namespace kdd {

FeatureLayout layout_from_schema(const FeatureSchema& schema) {
    FeatureLayout layout;
    const auto& columns = schema.columns();
    layout.kinds.reserve(columns.size());
    layout.slots.reserve(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        layout.kinds.push_back(columns[f].kind);
        layout.slots.push_back(static_cast<std::uint32_t>(schema.slot_of(f)));
        if (columns[f].kind == ColumnKind::Numeric) {
            ++layout.numeric_count;
        } else {
            // +1 for the reserved unseen index
            layout.nominal_arity.push_back(static_cast<std::int32_t>(columns[f].domain.size()) + 1);
        }
    }
    return layout;
}

DataTable::DataTable(FeatureLayout layout, std::int32_t class_count)
    : layout_(std::move(layout)), class_count_(class_count) {
    numeric_.resize(layout_.numeric_count);
    nominal_.resize(layout_.nominal_arity.size());
}

void DataTable::add_row(const RawInstance& values, std::int32_t klass) {
    if (values.numeric.size() != numeric_.size() || values.nominal.size() != nominal_.size()) {
        throw Error("instance arity does not match the table layout");
    }
    if (klass < 0 || klass >= class_count_) throw Error("class index out of range");
    for (std::size_t s = 0; s < numeric_.size(); ++s) numeric_[s].push_back(values.numeric[s]);
    for (std::size_t s = 0; s < nominal_.size(); ++s) {
        assert(values.nominal[s] >= 0 && values.nominal[s] < layout_.nominal_arity[s]);
        nominal_[s].push_back(values.nominal[s]);
    }
    klass_.push_back(klass);
}

RawInstance DataTable::row(std::size_t i, std::vector<double>& numeric_scratch,
                           std::vector<std::int32_t>& nominal_scratch) const {
    numeric_scratch.resize(numeric_.size());
    nominal_scratch.resize(nominal_.size());
    for (std::size_t s = 0; s < numeric_.size(); ++s) numeric_scratch[s] = numeric_[s][i];
    for (std::size_t s = 0; s < nominal_.size(); ++s) nominal_scratch[s] = nominal_[s][i];
    return RawInstance{numeric_scratch, nominal_scratch};
}

DataTable build_table(const std::vector<ConnectionRecord>& records, const FeatureSchema& schema,
                      const AttackTaxonomy& taxonomy, TableBuildStats* stats) {
    DataTable table(layout_from_schema(schema), static_cast<std::int32_t>(kCategoryCount));
    TableBuildStats local;
    for (const auto& rec : records) {
        const Category c = taxonomy.categorize(rec.label);
        if (c == Category::Unknown) {
            ++local.skipped_unknown_category;
            continue;
        }
        table.add_row(as_instance(rec), static_cast<std::int32_t>(c));
        ++local.rows;
    }
    if (stats != nullptr) *stats = local;
    return table;
}

}  // namespace kdd
