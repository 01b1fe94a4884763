#include "loskit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loskit/error.hpp"

namespace loskit {

namespace {

constexpr double kGainEps = 1e-12;

void check_proportions(std::span<const double> p) {
    double sum = 0;
    for (double v : p) {
        if (v < 0)
            throw Error::validation("impurity: negative proportion");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw Error::validation("impurity: proportions must sum to 1");
}

double entropy_from_counts(std::span<const double> counts, double total) {
    if (total <= 0) return 0.0;
    double h = 0;
    for (double c : counts) {
        if (c <= 0) continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

double gini_from_counts(std::span<const double> counts, double total) {
    if (total <= 0) return 0.0;
    double s = 0;
    for (double c : counts) {
        const double p = c / total;
        s += p * p;
    }
    return 1.0 - s;
}

double impurity_from_counts(std::span<const double> counts, double total, Criterion criterion) {
    return criterion == Criterion::entropy ? entropy_from_counts(counts, total)
                                           : gini_from_counts(counts, total);
}

}  // namespace

std::string criterion_name(Criterion c) {
    return c == Criterion::entropy ? "entropy" : "gini";
}

Criterion criterion_from_name(const std::string& name) {
    if (name == "entropy") return Criterion::entropy;
    if (name == "gini") return Criterion::gini;
    throw Error::validation("unknown criterion: " + name);
}

std::size_t MaxFeatures::resolve(std::size_t d) const {
    switch (mode) {
        case Mode::all: return d;
        case Mode::sqrt_of_d:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
        case Mode::count: return std::clamp<std::size_t>(count, 1, d);
    }
    return d;
}

void TreeParams::validate() const {
    if (max_depth < 1)
        throw Error::validation("tree params: max_depth must be >= 1");
    if (min_samples_split < 2)
        throw Error::validation("tree params: min_samples_split must be >= 2");
    if (min_samples_leaf < 1)
        throw Error::validation("tree params: min_samples_leaf must be >= 1");
}

double entropy(std::span<const double> proportions) {
    check_proportions(proportions);
    double h = 0;
    for (double p : proportions) {
        if (p == 0) continue;  // 0 log 0 = 0 by continuity
        h -= p * std::log2(p);
    }
    return h;
}

double gini(std::span<const double> proportions) {
    check_proportions(proportions);
    double s = 0;
    for (double p : proportions) s += p * p;
    return 1.0 - s;
}

double information_gain(std::span<const double> parent_counts,
                        std::span<const double> left_counts,
                        std::span<const double> right_counts, Criterion criterion) {
    if (parent_counts.size() != left_counts.size() ||
        parent_counts.size() != right_counts.size())
        throw Error::validation("information_gain: class-count width mismatch");
    double n = 0, nl = 0, nr = 0;
    for (std::size_t c = 0; c < parent_counts.size(); ++c) {
        if (std::fabs(left_counts[c] + right_counts[c] - parent_counts[c]) > 1e-9)
            throw Error::validation("information_gain: left + right != parent");
        n += parent_counts[c];
        nl += left_counts[c];
        nr += right_counts[c];
    }
    if (n <= 0)
        throw Error::validation("information_gain: empty parent");
    const double hp = impurity_from_counts(parent_counts, n, criterion);
    const double hl = impurity_from_counts(left_counts, nl, criterion);
    const double hr = impurity_from_counts(right_counts, nr, criterion);
    return hp - (nl / n) * hl - (nr / n) * hr;
}

std::optional<SplitCandidate> best_split(const Matrix& X, const LabelVector& y,
                                         std::span<const double> weights,
                                         std::span<const std::int32_t> idx,
                                         std::size_t n_classes, const TreeParams& params,
                                         Rng& rng) {
    const std::size_t n = idx.size();
    if (n < params.min_samples_split) return std::nullopt;
    const std::size_t d = X.cols();

    // Candidate features: all, or a seeded subset. Candidates are scanned in
    // ascending index order so ties resolve deterministically.
    std::vector<std::size_t> features;
    const std::size_t m = params.max_features.resolve(d);
    if (m >= d) {
        features.resize(d);
        std::iota(features.begin(), features.end(), 0);
    } else {
        std::vector<std::size_t> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + uniform_index(rng, d - i);
            std::swap(pool[i], pool[j]);
        }
        features.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(features.begin(), features.end());
    }

    std::vector<double> parent_counts(n_classes, 0.0);
    double total_w = 0;
    for (const std::int32_t i : idx) {
        const double w = weights.empty() ? 1.0 : weights[static_cast<std::size_t>(i)];
        parent_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] += w;
        total_w += w;
    }
    const double parent_imp = impurity_from_counts(parent_counts, total_w, params.criterion);

    struct Entry {
        double value;
        double weight;
        int label;
    };
    std::vector<Entry> entries(n);

    std::optional<SplitCandidate> best;
    std::vector<double> left_counts(n_classes);

    for (const std::size_t f : features) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = static_cast<std::size_t>(idx[k]);
            entries[k] = {X(i, f), weights.empty() ? 1.0 : weights[i], y[i]};
        }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.value < b.value; });

        std::fill(left_counts.begin(), left_counts.end(), 0.0);
        double left_w = 0;
        std::size_t left_n = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            left_counts[static_cast<std::size_t>(entries[k].label)] += entries[k].weight;
            left_w += entries[k].weight;
            ++left_n;
            if (entries[k].value == entries[k + 1].value) continue;
            if (left_n < params.min_samples_leaf || n - left_n < params.min_samples_leaf)
                continue;
            const double right_w = total_w - left_w;
            if (left_w <= 0 || right_w <= 0) continue;
            double left_imp = 0, right_imp = 0;
            if (params.criterion == Criterion::entropy) {
                left_imp = entropy_from_counts(left_counts, left_w);
                right_imp = 0;
                for (std::size_t c = 0; c < n_classes; ++c) {
                    const double rc = parent_counts[c] - left_counts[c];
                    if (rc <= 0 || right_w <= 0) continue;
                    const double p = rc / right_w;
                    right_imp -= p * std::log2(p);
                }
            } else {
                left_imp = gini_from_counts(left_counts, left_w);
                double s = 0;
                for (std::size_t c = 0; c < n_classes; ++c) {
                    const double rc = parent_counts[c] - left_counts[c];
                    if (right_w <= 0) continue;
                    const double p = rc / right_w;
                    s += p * p;
                }
                right_imp = 1.0 - s;
            }
            const double gain = parent_imp - (left_w / total_w) * left_imp -
                                ((total_w - left_w) / total_w) * right_imp;
            if (!best || gain > best->gain + kGainEps) {
                const double threshold = 0.5 * (entries[k].value + entries[k + 1].value);
                best = SplitCandidate{f, threshold, gain};
            }
        }
    }

    if (!best || best->gain <= kGainEps) return std::nullopt;
    return best;
}

namespace {

struct TreeBuilder {
    const Matrix& X;
    const LabelVector& y;
    std::span<const double> weights;
    const TreeParams& params;
    std::size_t n_classes;
    double total_weight;
    Rng rng;
    TreeModel model;
    std::vector<std::int32_t> idx;

    double weight_of(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }

    int build(std::size_t lo, std::size_t hi, std::size_t depth) {
        const std::span<const std::int32_t> node_idx(idx.data() + lo, hi - lo);

        std::vector<double> counts(n_classes, 0.0);
        double w = 0;
        for (const std::int32_t i : node_idx) {
            counts[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])] +=
                weight_of(static_cast<std::size_t>(i));
            w += weight_of(static_cast<std::size_t>(i));
        }
        std::size_t present = 0;
        for (double c : counts)
            if (c > 0) ++present;

        std::optional<SplitCandidate> split;
        if (depth < params.max_depth && present > 1)
            split = best_split(X, y, weights, node_idx, n_classes, params, rng);

        const int id = static_cast<int>(model.nodes.size());
        model.nodes.emplace_back();
        if (!split) {
            TreeNode& leaf = model.nodes[static_cast<std::size_t>(id)];
            leaf.class_counts = std::move(counts);
            leaf.predicted_class = static_cast<int>(
                std::max_element(leaf.class_counts.begin(), leaf.class_counts.end()) -
                leaf.class_counts.begin());
            return id;
        }

        // importance: node-weight-scaled impurity decrease.
        model.importance[split->feature] += (w / total_weight) * split->gain;

        const auto mid_iter =
            std::partition(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                           idx.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::int32_t i) {
                               return X(static_cast<std::size_t>(i), split->feature) <=
                                      split->threshold;
                           });
        const std::size_t mid = static_cast<std::size_t>(mid_iter - idx.begin());

        // Keep row order stable inside each side so the build is deterministic.
        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(lo), mid_iter);
        std::sort(mid_iter, idx.begin() + static_cast<std::ptrdiff_t>(hi));

        const int left = build(lo, mid, depth + 1);
        const int right = build(mid, hi, depth + 1);
        TreeNode& node = model.nodes[static_cast<std::size_t>(id)];
        node.feature = static_cast<int>(split->feature);
        node.threshold = split->threshold;
        node.left = left;
        node.right = right;
        return id;
    }
};

}  // namespace

std::size_t TreeModel::n_leaves() const {
    std::size_t n = 0;
    for (const auto& node : nodes)
        if (node.is_leaf()) ++n;
    return n;
}

TreeModel fit_tree(const Matrix& X, const LabelVector& y, const TreeParams& params,
                   std::span<const double> weights, std::size_t n_classes) {
    params.validate();
    const std::size_t n = X.rows();
    if (n == 0)
        throw Error::validation("fit_tree: empty input");
    if (y.size() != n)
        throw Error::validation("fit_tree: label count does not match row count");
    if (!weights.empty() && weights.size() != n)
        throw Error::validation("fit_tree: weight count does not match row count");
    if (n_classes == 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = static_cast<std::size_t>(max_label) + 1;
    }
    for (int label : y)
        if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
            throw Error::validation("fit_tree: label out of range");

    TreeBuilder builder{X,       y,
                        weights, params,
                        n_classes, 0.0,
                        Rng(params.seed), TreeModel{},
                        {}};
    builder.model.n_features = X.cols();
    builder.model.n_classes = n_classes;
    builder.model.params = params;
    builder.model.importance.assign(X.cols(), 0.0);
    builder.idx.resize(n);
    std::iota(builder.idx.begin(), builder.idx.end(), 0);
    for (std::size_t i = 0; i < n; ++i) builder.total_weight += builder.weight_of(i);
    builder.build(0, n, 0);
    return std::move(builder.model);
}

std::pair<int, std::vector<double>> tree_predict(const TreeModel& model,
                                                 std::span<const double> row) {
    if (row.size() != model.n_features)
        throw Error::validation("tree_predict: row width does not match the model");
    const TreeNode* node = &model.nodes[0];
    while (!node->is_leaf()) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &model.nodes[static_cast<std::size_t>(node->left)]
                   : &model.nodes[static_cast<std::size_t>(node->right)];
    }
    double total = 0;
    for (double c : node->class_counts) total += c;
    std::vector<double> proba(model.n_classes, 0.0);
    if (total > 0)
        for (std::size_t c = 0; c < model.n_classes; ++c)
            proba[c] = node->class_counts[c] / total;
    return {node->predicted_class, std::move(proba)};
}

int tree_predict_class(const TreeModel& model, std::span<const double> row) {
    if (row.size() != model.n_features)
        throw Error::validation("tree_predict: row width does not match the model");
    const TreeNode* node = &model.nodes[0];
    while (!node->is_leaf()) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &model.nodes[static_cast<std::size_t>(node->left)]
                   : &model.nodes[static_cast<std::size_t>(node->right)];
    }
    return node->predicted_class;
}

}  // namespace loskit
