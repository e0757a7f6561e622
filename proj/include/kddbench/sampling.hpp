#pragma once

// Stratified reorganization of the corpus: fixed per-label quotas drawn
// uniformly without replacement, then a global shuffle, plus an independent
// holdout drawn from the untouched remainder. Everything is a pure function
// of (corpus order, seed); per-label draws use substreams derived from the
// label so adding a stratum never disturbs another stratum's picks.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kddbench/taxonomy.hpp"

namespace kdd {

struct SamplingPlan {
    std::map<std::string, std::uint64_t> targets;  // raw label -> requested count
    std::uint64_t seed = 1;
    std::string note;  // free text carried with the plan, echoed into logs

    std::uint64_t total() const;
};

// Plan file: optional '#' comments, a `seed=<u64>` line, an optional
// `note=<text>` line, then CSV rows `label,target_count`.
SamplingPlan load_plan(const std::string& path);
SamplingPlan parse_plan(std::string_view text, std::string_view origin = "<memory>");
std::string plan_to_text(const SamplingPlan& plan);

// The paper's reorganized training extract: Table 2 quotas verbatim, seed 1.
// The quotas sum to 148,753 while the prose total is 148,758; the plan note
// records that and the numbers are used as printed.
SamplingPlan table2_plan();

// Corpus ordinals grouped by raw label, in corpus order within each group.
struct StratifiedIndex {
    std::map<std::string, std::vector<std::uint64_t>> by_label;
    std::uint64_t total = 0;

    void add(const std::string& label, std::uint64_t ordinal);
};

struct DatasetSplit {
    std::vector<std::uint64_t> train;
    std::vector<std::uint64_t> test;
};

// Exactly plan.targets[l] ordinals per label, drawn uniformly without
// replacement from that label's stratum, concatenated over labels in sorted
// order and then globally shuffled. Throws PlanError naming the label when a
// target exceeds the stratum.
std::vector<std::uint64_t> stratified_sample(const StratifiedIndex& corpus,
                                             const SamplingPlan& plan);

// `test_size` ordinals drawn uniformly without replacement from
// [0, corpus_size) minus `train`. Throws PlanError when the remainder is too
// small.
DatasetSplit holdout_sample(std::uint64_t corpus_size, std::vector<std::uint64_t> train,
                            std::uint64_t test_size, std::uint64_t seed);

// Category fractions of a sample; fractions sum to 1. Throws MetricError on
// an empty sample.
std::map<Category, double> class_proportions(const std::vector<std::string>& labels,
                                             const AttackTaxonomy& taxonomy);

// Split manifests: `# role: train|test` header, one ordinal per line. The
// manifest is the unit of reproducibility shared between runs.
void write_manifest(const std::string& path, const std::vector<std::uint64_t>& ordinals,
                    std::string_view role);
std::vector<std::uint64_t> read_manifest(const std::string& path, std::string* role_out = nullptr);

}  // namespace kdd
