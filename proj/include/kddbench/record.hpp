#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kdd {

// One parsed KDD connection record. Numeric and nominal values are stored in
// dense per-kind slot order (see FeatureSchema::slot_of); nominal values are
// indices into the declared domain, with index == domain size reserved for
// symbols unseen in the schema.
struct ConnectionRecord {
    std::vector<double> numeric;        // numeric slots, schema order
    std::vector<std::int32_t> nominal;  // nominal slots, schema order
    std::string label;                  // raw label, trailing '.' stripped

    bool operator==(const ConnectionRecord&) const = default;
};

// Borrowed view of one instance's raw feature values, in the same slot order.
// Models predict through this so they work for both stored records and rows
// of a column table.
struct RawInstance {
    std::span<const double> numeric;
    std::span<const std::int32_t> nominal;
};

inline RawInstance as_instance(const ConnectionRecord& r) {
    return RawInstance{r.numeric, r.nominal};
}

}  // namespace kdd
