#pragma once

// Deterministic synthetic data for tests: KDD-format corpus text whose
// feature distributions differ per attack category (so classifiers have
// signal to learn), plus small generic tables for classifier unit tests.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kddbench/data_table.hpp"
#include "kddbench/rng.hpp"
#include "kddbench/schema.hpp"

namespace kdd::testsupport {

// The shipped 41-column schema, parsed from an embedded copy so tests do not
// depend on the working directory.
const FeatureSchema& kdd_schema();

// One KDD text line (no newline) for `label`, with category-dependent value
// distributions and the public files' trailing period on the label.
std::string synth_kdd_line(Rng& rng, std::string_view label, const FeatureSchema& schema);

// A corpus with exactly the requested per-label counts, line order shuffled
// deterministically by `seed`.
std::string synth_corpus(const std::vector<std::pair<std::string, std::uint64_t>>& label_counts,
                         std::uint64_t seed);

// Two-numeric-one-nominal table with class-dependent blobs; `noise` in [0,1]
// controls label noise. Classes in [0, classes).
DataTable synth_blob_table(std::size_t rows, std::int32_t classes, double noise,
                           std::uint64_t seed);

// Axis-separable two-class table (class = x0 > 0.5), no noise.
DataTable synth_separable_table(std::size_t rows, std::uint64_t seed);

// Nominal-only table with `features` columns of the given arity and a
// class-correlated first column.
DataTable synth_nominal_table(std::size_t rows, std::size_t features, std::int32_t arity,
                              std::int32_t classes, std::uint64_t seed);

}  // namespace kdd::testsupport
