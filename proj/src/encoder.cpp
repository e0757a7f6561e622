#include "kddbench/encoder.hpp"

#include <algorithm>

#include "kddbench/error.hpp"

namespace kdd {

Encoder Encoder::fit(const DataTable& training) {
    if (training.rows() == 0) throw Error("cannot fit an encoder on an empty training set");
    Encoder enc;
    enc.layout_ = training.layout();
    const std::size_t numeric_slots = enc.layout_.numeric_count;
    enc.min_.resize(numeric_slots);
    enc.span_.resize(numeric_slots);
    for (std::size_t s = 0; s < numeric_slots; ++s) {
        const auto& col = training.numeric_column(s);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        enc.min_[s] = *lo;
        enc.span_[s] = (*hi > *lo) ? (*hi - *lo) : 1.0;
    }
    enc.encoded_size_ = numeric_slots;
    for (const std::int32_t arity : enc.layout_.nominal_arity) {
        enc.encoded_size_ += static_cast<std::size_t>(arity - 1);  // domain size, no unseen column
    }
    return enc;
}

void Encoder::transform(const RawInstance& instance, std::vector<double>& out) const {
    if (instance.numeric.size() != min_.size() ||
        instance.nominal.size() != layout_.nominal_arity.size()) {
        throw Error("instance arity does not match the encoder");
    }
    out.assign(encoded_size_, 0.0);
    for (std::size_t s = 0; s < min_.size(); ++s) {
        out[s] = scale_numeric(instance.numeric[s], s);
    }
    std::size_t base = min_.size();
    for (std::size_t s = 0; s < layout_.nominal_arity.size(); ++s) {
        const std::int32_t domain = layout_.nominal_arity[s] - 1;
        const std::int32_t v = instance.nominal[s];
        if (v >= 0 && v < domain) out[base + static_cast<std::size_t>(v)] = 1.0;
        base += static_cast<std::size_t>(domain);
    }
}

std::vector<double> Encoder::transform(const RawInstance& instance) const {
    std::vector<double> out;
    transform(instance, out);
    return out;
}

DataTable scale_numeric_columns(const DataTable& raw, const Encoder& encoder) {
    DataTable scaled(raw.layout(), raw.class_count());
    std::vector<double> numeric(raw.layout().numeric_count);
    std::vector<std::int32_t> nominal(raw.layout().nominal_count());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        for (std::size_t s = 0; s < numeric.size(); ++s) {
            numeric[s] = encoder.scale_numeric(raw.numeric_column(s)[i], s);
        }
        for (std::size_t s = 0; s < nominal.size(); ++s) {
            nominal[s] = raw.nominal_column(s)[i];
        }
        scaled.add_row(RawInstance{numeric, nominal}, raw.classes()[i]);
    }
    return scaled;
}

}  // namespace kdd
