#include "kddbench/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "kddbench/error.hpp"
#include "kddbench/rng.hpp"

namespace kdd {

namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    const auto rc = std::from_chars(text.data(), text.data() + text.size(), value);
    if (rc.ec != std::errc() || rc.ptr != text.data() + text.size()) {
        throw PlanError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::uint64_t SamplingPlan::total() const {
    std::uint64_t sum = 0;
    for (const auto& [_, count] : targets) sum += count;
    return sum;
}

SamplingPlan parse_plan(std::string_view text, std::string_view origin) {
    SamplingPlan plan;
    bool seed_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        const bool last = eol >= text.size();
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (last) break;
            continue;
        }
        if (line.starts_with("seed=")) {
            plan.seed = parse_u64(line.substr(5), "seed");
            seed_seen = true;
        } else if (line.starts_with("note=")) {
            plan.note = std::string(line.substr(5));
        } else {
            const std::size_t comma = line.find(',');
            if (comma == std::string_view::npos || comma == 0) {
                throw PlanError(std::string(origin) + ":" + std::to_string(line_no) +
                                ": expected 'label,target_count'");
            }
            const std::string label(line.substr(0, comma));
            if (plan.targets.contains(label)) {
                throw PlanError(std::string(origin) + ":" + std::to_string(line_no) +
                                    ": duplicate label",
                                label);
            }
            plan.targets[label] = parse_u64(line.substr(comma + 1), "target count");
        }
        if (last) break;
    }
    if (!seed_seen) throw PlanError(std::string(origin) + ": missing 'seed=<u64>' line");
    return plan;
}

SamplingPlan load_plan(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open plan file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_plan(buf.str(), path);
}

std::string plan_to_text(const SamplingPlan& plan) {
    std::string out = "seed=" + std::to_string(plan.seed) + "\n";
    if (!plan.note.empty()) out += "note=" + plan.note + "\n";
    for (const auto& [label, count] : plan.targets) {
        out += label + "," + std::to_string(count) + "\n";
    }
    return out;
}

SamplingPlan table2_plan() {
    SamplingPlan plan;
    plan.seed = 1;
    plan.note =
        "per-label quotas total 148753; the source experiment's prose says 148758 "
        "(unexplained 5-instance gap, quotas used as printed)";
    plan.targets = {
        {"smurf", 85983},  {"neptune", 32827}, {"back", 70},
        {"pod", 10},       {"teardrop", 30},   {"buffer_overflow", 10},
        {"loadmodule", 2}, {"perl", 1},        {"rootkit", 5},
        {"ftp_write", 2},  {"guess_passwd", 10}, {"imap", 4},
        {"multihop", 2},   {"phf", 1},         {"spy", 1},
        {"warezclient", 31}, {"warezmaster", 7}, {"ipsweep", 382},
        {"nmap", 70},      {"portsweep", 318}, {"satan", 487},
        {"normal", 28500},
    };
    return plan;
}

void StratifiedIndex::add(const std::string& label, std::uint64_t ordinal) {
    by_label[label].push_back(ordinal);
    ++total;
}

std::vector<std::uint64_t> stratified_sample(const StratifiedIndex& corpus,
                                             const SamplingPlan& plan) {
    for (const auto& [label, target] : plan.targets) {
        auto it = corpus.by_label.find(label);
        const std::uint64_t available = it == corpus.by_label.end() ? 0 : it->second.size();
        if (target > available) {
            throw PlanError("label '" + label + "' requests " + std::to_string(target) +
                                " instances but only " + std::to_string(available) +
                                " are available",
                            label);
        }
    }

    std::vector<std::uint64_t> picked;
    picked.reserve(plan.total());
    // std::map iteration is sorted by label, which fixes the concatenation
    // order independently of plan-file ordering.
    for (const auto& [label, target] : plan.targets) {
        if (target == 0) continue;
        const auto& stratum = corpus.by_label.at(label);
        Rng rng(derive_seed(plan.seed, label));
        auto drawn = sample_without_replacement(std::span<const std::uint64_t>(stratum),
                                                target, rng);
        picked.insert(picked.end(), drawn.begin(), drawn.end());
    }

    Rng shuffler(derive_seed(plan.seed, std::string_view("global-shuffle")));
    shuffle(std::span<std::uint64_t>(picked), shuffler);
    return picked;
}

DatasetSplit holdout_sample(std::uint64_t corpus_size, std::vector<std::uint64_t> train,
                            std::uint64_t test_size, std::uint64_t seed) {
    std::vector<bool> taken(corpus_size, false);
    for (std::uint64_t ordinal : train) {
        if (ordinal >= corpus_size) {
            throw PlanError("train ordinal " + std::to_string(ordinal) +
                            " outside corpus of size " + std::to_string(corpus_size));
        }
        taken[ordinal] = true;
    }
    std::vector<std::uint64_t> pool;
    pool.reserve(corpus_size - train.size());
    for (std::uint64_t i = 0; i < corpus_size; ++i) {
        if (!taken[i]) pool.push_back(i);
    }
    if (test_size > pool.size()) {
        throw PlanError("holdout of " + std::to_string(test_size) +
                        " requested but only " + std::to_string(pool.size()) +
                        " records remain outside the training extract");
    }
    Rng rng(derive_seed(seed, std::string_view("holdout")));
    DatasetSplit split;
    split.train = std::move(train);
    split.test = sample_without_replacement(std::span<const std::uint64_t>(pool), test_size, rng);
    return split;
}

std::map<Category, double> class_proportions(const std::vector<std::string>& labels,
                                             const AttackTaxonomy& taxonomy) {
    if (labels.empty()) throw MetricError("class proportions undefined for an empty sample");
    std::map<Category, std::uint64_t> counts;
    for (const auto& label : labels) ++counts[taxonomy.categorize(label)];
    std::map<Category, double> fractions;
    for (const auto& [category, count] : counts) {
        fractions[category] = static_cast<double>(count) / static_cast<double>(labels.size());
    }
    return fractions;
}

void write_manifest(const std::string& path, const std::vector<std::uint64_t>& ordinals,
                    std::string_view role) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "# role: " << role << "\n";
    for (std::uint64_t ordinal : ordinals) out << ordinal << "\n";
    if (!out) throw IoError("short write: " + path);
}

std::vector<std::uint64_t> read_manifest(const std::string& path, std::string* role_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path);
    std::vector<std::uint64_t> ordinals;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const auto role_pos = line.find("role:");
            if (role_out != nullptr && role_pos != std::string::npos) {
                std::string role = line.substr(role_pos + 5);
                role.erase(0, role.find_first_not_of(' '));
                *role_out = role;
            }
            continue;
        }
        ordinals.push_back(parse_u64(line, "ordinal"));
    }
    return ordinals;
}

}  // namespace kdd
