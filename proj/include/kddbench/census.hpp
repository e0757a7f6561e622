#pragma once

// Per-label instance counting over a record stream. Counts are mergeable
// (plain addition), which is what makes sharded counting possible.

#include <cstdint>
#include <map>
#include <string>

#include "kddbench/record_reader.hpp"

namespace kdd {

struct LabelCensus {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(const std::string& label) {
        ++counts[label];
        ++total;
    }
    void merge(const LabelCensus& other);
};

// Single pass, memory proportional to the number of distinct labels.
LabelCensus census(RecordReader& records);

// Two-column CSV `label,count`, descending by count (ties by label), with a
// header row and a final `total,<n>` line.
std::string census_to_csv(const LabelCensus& census);

}  // namespace kdd
