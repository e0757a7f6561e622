#include "kddbench/bayes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "kddbench/error.hpp"

namespace kdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// exp-normalizes log scores into a probability vector
std::vector<double> normalize_log(std::vector<double> log_scores) {
    double max_score = kNegInf;
    for (double s : log_scores) max_score = std::max(max_score, s);
    if (max_score == kNegInf) {
        throw MetricError("all class log-likelihoods are -inf");
    }
    double sum = 0;
    for (double s : log_scores) sum += std::exp(s - max_score);
    const double log_norm = max_score + std::log(sum);
    for (double& s : log_scores) s = std::exp(s - log_norm);
    return log_scores;
}

double gaussian_log_density(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * M_PI * variance) - d * d / (2.0 * variance);
}

std::vector<double> equal_frequency_cuts(std::vector<double> values, std::uint32_t bins) {
    std::sort(values.begin(), values.end());
    std::vector<double> cuts;
    const std::size_t n = values.size();
    for (std::uint32_t k = 1; k < bins; ++k) {
        const std::size_t idx = (static_cast<std::size_t>(k) * n) / bins;
        if (idx < 1 || idx >= n) continue;
        const double cut = values[idx - 1];
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
    return cuts;
}

std::int32_t bin_of(const std::vector<double>& cuts, double x) {
    // number of cutpoints strictly below x; ties land in the lower bin
    return static_cast<std::int32_t>(
        std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

}  // namespace

NaiveBayesModel train_naive_bayes(const DataTable& data, double alpha, double variance_floor) {
    if (data.rows() == 0) throw Error("cannot train Naive Bayes on an empty set");
    if (!(alpha >= 0)) throw ConfigError("smoothing alpha must be non-negative");
    if (!(variance_floor > 0)) throw ConfigError("variance floor must be positive");

    NaiveBayesModel model;
    model.layout = data.layout();
    model.class_count = data.class_count();
    model.alpha = alpha;
    model.variance_floor = variance_floor;

    const std::size_t C = static_cast<std::size_t>(model.class_count);
    const std::size_t n = data.rows();
    std::vector<std::uint64_t> class_counts(C, 0);
    for (std::int32_t y : data.classes()) ++class_counts[static_cast<std::size_t>(y)];
    model.priors.resize(C);
    for (std::size_t y = 0; y < C; ++y) {
        model.priors[y] = static_cast<double>(class_counts[y]) / static_cast<double>(n);
    }

    model.nominal_log_likelihood.resize(data.layout().nominal_count());
    for (std::size_t s = 0; s < data.layout().nominal_count(); ++s) {
        const auto arity = static_cast<std::size_t>(data.layout().nominal_arity[s]);
        std::vector<std::uint64_t> counts(C * arity, 0);
        const auto& col = data.nominal_column(s);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[static_cast<std::size_t>(data.classes()[i]) * arity +
                     static_cast<std::size_t>(col[i])];
        }
        auto& table = model.nominal_log_likelihood[s];
        table.resize(C * arity);
        for (std::size_t y = 0; y < C; ++y) {
            const double denom =
                static_cast<double>(class_counts[y]) + alpha * static_cast<double>(arity);
            for (std::size_t v = 0; v < arity; ++v) {
                table[y * arity + v] =
                    std::log((static_cast<double>(counts[y * arity + v]) + alpha) / denom);
            }
        }
    }

    model.means.resize(data.layout().numeric_count);
    model.variances.resize(data.layout().numeric_count);
    for (std::size_t s = 0; s < data.layout().numeric_count; ++s) {
        const auto& col = data.numeric_column(s);
        auto& means = model.means[s];
        auto& vars = model.variances[s];
        means.assign(C, 0.0);
        vars.assign(C, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            means[static_cast<std::size_t>(data.classes()[i])] += col[i];
        }
        for (std::size_t y = 0; y < C; ++y) {
            if (class_counts[y] > 0) means[y] /= static_cast<double>(class_counts[y]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto y = static_cast<std::size_t>(data.classes()[i]);
            const double d = col[i] - means[y];
            vars[y] += d * d;
        }
        for (std::size_t y = 0; y < C; ++y) {
            vars[y] = class_counts[y] > 0 ? vars[y] / static_cast<double>(class_counts[y]) : 0.0;
            vars[y] = std::max(vars[y], variance_floor);
        }
    }
    return model;
}

std::vector<double> posterior(const NaiveBayesModel& model, const RawInstance& instance) {
    if (instance.numeric.size() != model.layout.numeric_count ||
        instance.nominal.size() != model.layout.nominal_count()) {
        throw Error("instance arity does not match the model");
    }
    const std::size_t C = static_cast<std::size_t>(model.class_count);
    std::vector<double> ll(C);
    for (std::size_t y = 0; y < C; ++y) {
        if (model.priors[y] == 0) {
            ll[y] = kNegInf;
            continue;
        }
        double score = std::log(model.priors[y]);
        for (std::size_t s = 0; s < instance.nominal.size(); ++s) {
            const auto arity = static_cast<std::size_t>(model.layout.nominal_arity[s]);
            score += model.nominal_log_likelihood[s][y * arity +
                                                     static_cast<std::size_t>(instance.nominal[s])];
        }
        for (std::size_t s = 0; s < instance.numeric.size(); ++s) {
            score += gaussian_log_density(instance.numeric[s], model.means[s][y],
                                          model.variances[s][y]);
        }
        ll[y] = score;
    }
    return normalize_log(std::move(ll));
}

std::vector<double> rebalance_posterior(std::span<const double> balanced_posterior,
                                        std::span<const double> balanced_priors,
                                        std::span<const double> true_priors) {
    if (balanced_posterior.size() != balanced_priors.size() ||
        balanced_posterior.size() != true_priors.size()) {
        throw Error("posterior/prior arity mismatch");
    }
    std::vector<double> out(balanced_posterior.size());
    double total = 0;
    for (std::size_t y = 0; y < out.size(); ++y) {
        if (balanced_posterior[y] == 0) {
            out[y] = 0;
            continue;
        }
        if (true_priors[y] == 0) {
            throw MetricError("true prior is zero for a class with posterior mass");
        }
        if (balanced_priors[y] == 0) {
            throw MetricError("balanced prior is zero for a class with posterior mass");
        }
        out[y] = balanced_posterior[y] / balanced_priors[y] * true_priors[y];
        total += out[y];
    }
    if (!(total > 0)) throw MetricError("rebalanced posterior has no mass");
    for (double& p : out) p /= total;
    return out;
}

std::vector<double> combine_posteriors(std::span<const std::vector<double>> group_posteriors,
                                       std::span<const double> priors) {
    if (group_posteriors.size() < 2) throw Error("combination needs at least two groups");
    const std::size_t C = priors.size();
    for (const auto& g : group_posteriors) {
        if (g.size() != C) throw Error("class arity differs across groups");
    }
    std::vector<double> ll(C, kNegInf);
    for (std::size_t y = 0; y < C; ++y) {
        if (priors[y] == 0) continue;
        double score = std::log(priors[y]);
        bool dead = false;
        for (const auto& g : group_posteriors) {
            if (g[y] == 0) {
                dead = true;
                break;
            }
            score += std::log(g[y]) - std::log(priors[y]);
        }
        if (!dead) ll[y] = score;
    }
    return normalize_log(std::move(ll));
}

// --- Bayes network -------------------------------------------------------

namespace {

struct DiscreteView {
    // per global feature: values per row and arity
    std::vector<std::vector<std::int32_t>> values;
    std::vector<std::int32_t> arity;
};

DiscreteView discretize(const DataTable& data, std::uint32_t bins,
                        std::vector<std::vector<double>>& cutpoints) {
    const auto& layout = data.layout();
    DiscreteView view;
    view.values.resize(layout.feature_count());
    view.arity.resize(layout.feature_count());
    cutpoints.assign(layout.numeric_count, {});
    for (std::size_t f = 0; f < layout.feature_count(); ++f) {
        const std::size_t slot = layout.slots[f];
        if (layout.kinds[f] == ColumnKind::Numeric) {
            const auto& col = data.numeric_column(slot);
            cutpoints[slot] = equal_frequency_cuts(col, bins);
            auto& vals = view.values[f];
            vals.resize(col.size());
            for (std::size_t i = 0; i < col.size(); ++i) vals[i] = bin_of(cutpoints[slot], col[i]);
            view.arity[f] = static_cast<std::int32_t>(cutpoints[slot].size()) + 1;
        } else {
            view.values[f] = data.nominal_column(slot);
            view.arity[f] = layout.nominal_arity[slot];
        }
    }
    return view;
}

// Bayesian (marginal-likelihood) local score of feature f with the class
// plus `extras` as parents, under a uniform Dirichlet prior of weight alpha
// per cell.
double k2_local_score(const DiscreteView& view, const std::vector<std::int32_t>& classes,
                      std::size_t C, std::size_t f, const std::vector<std::int32_t>& extras,
                      double alpha) {
    const std::size_t r = static_cast<std::size_t>(view.arity[f]);
    std::size_t configs = C;
    for (std::int32_t p : extras) {
        configs *= static_cast<std::size_t>(view.arity[static_cast<std::size_t>(p)]);
        if (configs > (std::size_t{1} << 26)) {
            throw ConfigError("parent configuration space too large");
        }
    }
    std::vector<std::uint32_t> counts(configs * r, 0);
    std::vector<std::uint64_t> config_totals(configs, 0);
    const std::size_t n = view.values[f].size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t q = static_cast<std::size_t>(classes[i]);
        for (std::int32_t p : extras) {
            q = q * static_cast<std::size_t>(view.arity[static_cast<std::size_t>(p)]) +
                static_cast<std::size_t>(view.values[static_cast<std::size_t>(p)][i]);
        }
        ++counts[q * r + static_cast<std::size_t>(view.values[f][i])];
        ++config_totals[q];
    }
    const double ra = static_cast<double>(r) * alpha;
    double score = 0;
    for (std::size_t q = 0; q < configs; ++q) {
        if (config_totals[q] == 0) continue;
        score += std::lgamma(ra) - std::lgamma(ra + static_cast<double>(config_totals[q]));
        for (std::size_t k = 0; k < r; ++k) {
            const std::uint32_t c = counts[q * r + k];
            if (c != 0) {
                score += std::lgamma(alpha + static_cast<double>(c)) - std::lgamma(alpha);
            }
        }
    }
    return score;
}

}  // namespace

DataTable discretize_numeric_columns(const DataTable& data, std::uint32_t bins,
                                     std::vector<std::vector<double>>* cutpoints_out) {
    std::vector<std::vector<double>> cutpoints;
    const DiscreteView view = discretize(data, bins, cutpoints);
    if (cutpoints_out != nullptr) *cutpoints_out = cutpoints;

    FeatureLayout layout;
    layout.kinds.assign(data.layout().feature_count(), ColumnKind::Nominal);
    layout.numeric_count = 0;
    for (std::size_t f = 0; f < view.values.size(); ++f) {
        layout.slots.push_back(static_cast<std::uint32_t>(f));
        layout.nominal_arity.push_back(view.arity[f]);
    }
    DataTable out(std::move(layout), data.class_count());
    std::vector<std::int32_t> nominal(view.values.size());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t f = 0; f < view.values.size(); ++f) nominal[f] = view.values[f][i];
        out.add_row(RawInstance{{}, nominal}, data.classes()[i]);
    }
    return out;
}

BayesNetModel train_bayes_net(const DataTable& data, const BayesNetConfig& config) {
    if (data.rows() == 0) throw Error("cannot train a Bayes network on an empty set");
    if (!(config.alpha > 0)) throw ConfigError("simple-estimator alpha must be positive");
    if (config.numeric_bins < 1) throw ConfigError("numeric bin count must be at least 1");

    BayesNetModel model;
    model.layout = data.layout();
    model.class_count = data.class_count();
    model.config = config;

    const std::size_t C = static_cast<std::size_t>(model.class_count);
    const std::size_t n = data.rows();
    const DiscreteView view = discretize(data, config.numeric_bins, model.cutpoints);
    model.arity = view.arity;

    std::vector<std::uint64_t> class_counts(C, 0);
    for (std::int32_t y : data.classes()) ++class_counts[static_cast<std::size_t>(y)];
    model.priors.resize(C);
    for (std::size_t y = 0; y < C; ++y) {
        model.priors[y] = static_cast<double>(class_counts[y]) / static_cast<double>(n);
    }

    const std::size_t F = model.layout.feature_count();
    model.parents.resize(F);
    model.score_trace.resize(F);

    // K2 over the schema order: candidates for feature f are features before
    // it; each accepted parent must strictly improve the local score.
    for (std::size_t f = 0; f < F; ++f) {
        double current = k2_local_score(view, data.classes(), C, f, model.parents[f], config.alpha);
        model.score_trace[f].push_back(current);
        while (model.parents[f].size() < config.max_parents) {
            double best_score = current;
            std::int32_t best_candidate = -1;
            for (std::size_t j = 0; j < f; ++j) {
                const auto candidate = static_cast<std::int32_t>(j);
                if (std::find(model.parents[f].begin(), model.parents[f].end(), candidate) !=
                    model.parents[f].end()) {
                    continue;
                }
                auto trial = model.parents[f];
                trial.push_back(candidate);
                std::sort(trial.begin(), trial.end());
                const double score =
                    k2_local_score(view, data.classes(), C, f, trial, config.alpha);
                if (score > best_score) {
                    best_score = score;
                    best_candidate = candidate;
                }
            }
            if (best_candidate < 0) break;
            model.parents[f].push_back(best_candidate);
            std::sort(model.parents[f].begin(), model.parents[f].end());
            current = best_score;
            model.score_trace[f].push_back(current);
        }
    }

    // CPTs with the simple estimator.
    model.cpt.resize(F);
    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t r = static_cast<std::size_t>(model.arity[f]);
        std::size_t configs = C;
        for (std::int32_t p : model.parents[f]) {
            configs *= static_cast<std::size_t>(model.arity[static_cast<std::size_t>(p)]);
        }
        std::vector<std::uint32_t> counts(configs * r, 0);
        std::vector<std::uint64_t> totals(configs, 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t q = static_cast<std::size_t>(data.classes()[i]);
            for (std::int32_t p : model.parents[f]) {
                q = q * static_cast<std::size_t>(model.arity[static_cast<std::size_t>(p)]) +
                    static_cast<std::size_t>(view.values[static_cast<std::size_t>(p)][i]);
            }
            ++counts[q * r + static_cast<std::size_t>(view.values[f][i])];
            ++totals[q];
        }
        auto& table = model.cpt[f];
        table.resize(configs * r);
        for (std::size_t q = 0; q < configs; ++q) {
            const double denom =
                static_cast<double>(totals[q]) + config.alpha * static_cast<double>(r);
            for (std::size_t k = 0; k < r; ++k) {
                table[q * r + k] =
                    std::log((static_cast<double>(counts[q * r + k]) + config.alpha) / denom);
            }
        }
    }
    return model;
}

std::int32_t BayesNetModel::discrete_value(std::size_t feature, const RawInstance& instance) const {
    const std::size_t slot = layout.slots[feature];
    if (layout.kinds[feature] == ColumnKind::Numeric) {
        return bin_of(cutpoints[slot], instance.numeric[slot]);
    }
    return instance.nominal[slot];
}

std::vector<double> posterior(const BayesNetModel& model, const RawInstance& instance) {
    if (instance.numeric.size() != model.layout.numeric_count ||
        instance.nominal.size() != model.layout.nominal_count()) {
        throw Error("instance arity does not match the model");
    }
    const std::size_t C = static_cast<std::size_t>(model.class_count);
    const std::size_t F = model.layout.feature_count();
    std::vector<std::int32_t> values(F);
    for (std::size_t f = 0; f < F; ++f) {
        values[f] = model.discrete_value(f, instance);
    }
    std::vector<double> ll(C);
    for (std::size_t y = 0; y < C; ++y) {
        if (model.priors[y] == 0) {
            ll[y] = kNegInf;
            continue;
        }
        double score = std::log(model.priors[y]);
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t r = static_cast<std::size_t>(model.arity[f]);
            std::size_t q = y;
            for (std::int32_t p : model.parents[f]) {
                q = q * static_cast<std::size_t>(model.arity[static_cast<std::size_t>(p)]) +
                    static_cast<std::size_t>(values[static_cast<std::size_t>(p)]);
            }
            score += model.cpt[f][q * r + static_cast<std::size_t>(values[f])];
        }
        ll[y] = score;
    }
    return normalize_log(std::move(ll));
}

std::string render_network(const BayesNetModel& model) {
    std::string out;
    char buf[32];
    auto append_double = [&](double v) {
        const auto rc = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, rc.ptr);
    };
    for (std::size_t f = 0; f < model.layout.feature_count(); ++f) {
        out += "f" + std::to_string(f) + " <- class";
        for (std::int32_t p : model.parents[f]) out += " f" + std::to_string(p);
        out += '\n';
        const std::size_t r = static_cast<std::size_t>(model.arity[f]);
        const std::size_t configs = model.cpt[f].size() / r;
        for (std::size_t q = 0; q < configs; ++q) {
            out += "  [" + std::to_string(q) + "]";
            for (std::size_t k = 0; k < r; ++k) {
                out += ' ';
                append_double(std::exp(model.cpt[f][q * r + k]));
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace kdd
