#include "kddbench/census.hpp"

#include <algorithm>
#include <vector>

namespace kdd {

void LabelCensus::merge(const LabelCensus& other) {
    for (const auto& [label, count] : other.counts) counts[label] += count;
    total += other.total;
}

LabelCensus census(RecordReader& records) {
    LabelCensus result;
    ConnectionRecord rec;
    while (records.next(rec)) result.add(rec.label);
    return result;
}

std::string census_to_csv(const LabelCensus& census) {
    std::vector<std::pair<std::string, std::uint64_t>> rows(census.counts.begin(),
                                                            census.counts.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::string out = "label,count\n";
    for (const auto& [label, count] : rows) {
        out += label;
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    out += "total," + std::to_string(census.total) + "\n";
    return out;
}

}  // namespace kdd
