#include "kddbench/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "kddbench/error.hpp"
#include "kddbench/rng.hpp"

namespace kdd {

namespace {

void validate(const std::vector<Column>& columns, bool enforce_arity) {
    if (enforce_arity && columns.size() != FeatureSchema::kExpectedFeatureCount) {
        throw SchemaError("schema declares " + std::to_string(columns.size()) +
                          " feature columns, expected " +
                          std::to_string(FeatureSchema::kExpectedFeatureCount));
    }
    std::unordered_set<std::string> names;
    for (const auto& col : columns) {
        if (col.name.empty()) throw SchemaError("schema column with empty name");
        if (!names.insert(col.name).second) {
            throw SchemaError("duplicate column name: " + col.name);
        }
        if (col.kind == ColumnKind::Nominal) {
            if (col.domain.empty()) {
                throw SchemaError("nominal column '" + col.name + "' has an empty domain");
            }
            std::unordered_set<std::string> syms;
            for (const auto& s : col.domain) {
                if (s.empty() || !syms.insert(s).second) {
                    throw SchemaError("nominal column '" + col.name +
                                      "' has an empty or duplicate symbol");
                }
            }
        }
    }
}

std::vector<Column> parse_columns(std::string_view text, std::string_view origin) {
    std::vector<Column> columns;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (pos > text.size()) break;
            continue;
        }

        const std::size_t c1 = line.find(',');
        if (c1 == std::string_view::npos) {
            throw SchemaError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": expected '<name>,<kind>[,<symbols>]'");
        }
        Column col;
        col.name = std::string(line.substr(0, c1));
        const std::size_t c2 = line.find(',', c1 + 1);
        const std::string_view kind =
            line.substr(c1 + 1, (c2 == std::string_view::npos ? line.size() : c2) - c1 - 1);
        if (kind == "numeric") {
            col.kind = ColumnKind::Numeric;
            if (c2 != std::string_view::npos) {
                throw SchemaError(std::string(origin) + ":" + std::to_string(line_no) +
                                  ": numeric column '" + col.name + "' declares a domain");
            }
        } else if (kind == "nominal") {
            col.kind = ColumnKind::Nominal;
            if (c2 == std::string_view::npos) {
                throw SchemaError(std::string(origin) + ":" + std::to_string(line_no) +
                                  ": nominal column '" + col.name + "' missing its domain");
            }
            std::string_view rest = line.substr(c2 + 1);
            while (!rest.empty()) {
                const std::size_t semi = rest.find(';');
                col.domain.emplace_back(rest.substr(0, semi));
                if (semi == std::string_view::npos) break;
                rest.remove_prefix(semi + 1);
            }
        } else {
            throw SchemaError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": unknown column kind '" + std::string(kind) + "'");
        }
        columns.push_back(std::move(col));
        if (pos > text.size()) break;
    }
    return columns;
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<Column> columns) : columns_(std::move(columns)) {
    slot_.resize(columns_.size());
    lookup_.resize(columns_.size());
    for (std::size_t f = 0; f < columns_.size(); ++f) {
        if (columns_[f].kind == ColumnKind::Numeric) {
            slot_[f] = numeric_slots_.size();
            numeric_slots_.push_back(f);
        } else {
            slot_[f] = nominal_slots_.size();
            nominal_slots_.push_back(f);
            auto& table = lookup_[f];
            table.reserve(columns_[f].domain.size());
            for (std::size_t i = 0; i < columns_[f].domain.size(); ++i) {
                table.emplace_back(columns_[f].domain[i], static_cast<std::int32_t>(i));
            }
            std::sort(table.begin(), table.end());
        }
    }
}

std::int32_t FeatureSchema::symbol_index(std::size_t feature, std::string_view symbol) const {
    const auto& table = lookup_[feature];
    auto it = std::lower_bound(table.begin(), table.end(), symbol,
                               [](const auto& entry, std::string_view s) { return entry.first < s; });
    if (it != table.end() && it->first == symbol) return it->second;
    return unseen_index(feature);
}

std::string FeatureSchema::canonical_text() const {
    std::ostringstream out;
    for (const auto& col : columns_) {
        out << col.name << ',' << (col.kind == ColumnKind::Numeric ? "numeric" : "nominal");
        for (std::size_t i = 0; i < col.domain.size(); ++i) {
            out << (i == 0 ? ',' : ';') << col.domain[i];
        }
        out << '\n';
    }
    return out.str();
}

std::uint64_t FeatureSchema::digest() const { return fnv1a64(canonical_text()); }

FeatureSchema parse_schema(std::string_view text, std::string_view origin) {
    auto columns = parse_columns(text, origin);
    validate(columns, /*enforce_arity=*/true);
    return FeatureSchema(std::move(columns));
}

FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schema file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str(), path);
}

FeatureSchema make_schema_unchecked(std::vector<Column> columns) {
    validate(columns, /*enforce_arity=*/false);
    return FeatureSchema(std::move(columns));
}

}  // namespace kdd
