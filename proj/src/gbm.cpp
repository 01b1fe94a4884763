#include "loskit/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loskit/error.hpp"

namespace loskit {

namespace {

constexpr double kGainEps = 1e-12;

// Distinct-value counts up to this stay exact: one bin per value, thresholds
// at midpoints. Ordinal code columns always take this path.
constexpr std::size_t kExactBinLimit = 256;

struct HistBin {
    double g = 0, h = 0;
    std::uint32_t count = 0;
};

using NodeHist = std::vector<std::vector<HistBin>>;  // [feature][bin]

struct SplitInfo {
    double gain = 0;
    std::size_t feature = 0;
    std::size_t bin = 0;
    double threshold = 0;
    double left_g = 0, left_h = 0;
    std::size_t left_count = 0;
};

// Bin boundaries per feature. bin(v) = index of first upper >= v, so
// "bin <= b" is exactly "value <= uppers[b]".
struct FeatureBinning {
    std::vector<std::vector<double>> uppers;  // [feature][boundary]

    std::size_t n_bins(std::size_t f) const { return uppers[f].size() + 1; }

    std::uint16_t bin_of(std::size_t f, double v) const {
        const auto& u = uppers[f];
        return static_cast<std::uint16_t>(std::lower_bound(u.begin(), u.end(), v) - u.begin());
    }
};

FeatureBinning make_binning(const Matrix& X, std::size_t n_bins) {
    FeatureBinning binning;
    const std::size_t n = X.rows(), d = X.cols();
    binning.uppers.resize(d);
    std::vector<double> values(n);
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t i = 0; i < n; ++i) values[i] = X(i, f);
        std::sort(values.begin(), values.end());
        std::vector<double> distinct;
        for (std::size_t i = 0; i < n; ++i)
            if (i == 0 || values[i] != values[i - 1]) distinct.push_back(values[i]);

        auto& uppers = binning.uppers[f];
        if (distinct.size() <= kExactBinLimit) {
            for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
                uppers.push_back(0.5 * (distinct[i] + distinct[i + 1]));
        } else {
            for (std::size_t b = 1; b < n_bins; ++b) {
                const std::size_t pos = b * n / n_bins;
                if (pos == 0 || pos >= n) continue;
                if (values[pos - 1] < values[pos]) {
                    const double t = 0.5 * (values[pos - 1] + values[pos]);
                    if (uppers.empty() || t > uppers.back()) uppers.push_back(t);
                }
            }
        }
    }
    return binning;
}

struct TreeGrower {
    const std::vector<std::vector<std::uint16_t>>& binned;  // [feature][row]
    const FeatureBinning& binning;
    std::span<const double> grad;  // weighted, per row
    std::span<const double> hess;  // weighted, per row
    const GbmParams& params;

    struct BuildNode {
        std::size_t begin = 0, end = 0;
        double sum_g = 0, sum_h = 0;
        std::size_t depth = 0;
        int tree_id = 0;
        NodeHist hist;
        SplitInfo best;
        bool has_best = false;
        bool open = true;  // still in the frontier
    };

    std::vector<std::size_t> rows;
    RegTree tree;
    std::vector<BuildNode> nodes;

    NodeHist build_hist(std::size_t begin, std::size_t end) const {
        const std::size_t d = binned.size();
        NodeHist hist(d);
        for (std::size_t f = 0; f < d; ++f) hist[f].resize(binning.n_bins(f));
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t i = rows[k];
            for (std::size_t f = 0; f < d; ++f) {
                HistBin& bin = hist[f][binned[f][i]];
                bin.g += grad[i];
                bin.h += hess[i];
                ++bin.count;
            }
        }
        return hist;
    }

    static void subtract_hist(NodeHist& parent, const NodeHist& child) {
        for (std::size_t f = 0; f < parent.size(); ++f) {
            for (std::size_t b = 0; b < parent[f].size(); ++b) {
                parent[f][b].g -= child[f][b].g;
                parent[f][b].h -= child[f][b].h;
                parent[f][b].count -= child[f][b].count;
            }
        }
    }

    void find_best(BuildNode& node) const {
        node.has_best = false;
        if (node.depth >= params.max_depth) return;
        const std::size_t count = node.end - node.begin;
        if (count < 2 * params.min_data_in_leaf) return;
        const double lambda = params.leaf_l2;
        const double parent_term =
            (node.sum_g * node.sum_g) / (node.sum_h + lambda);

        SplitInfo best;
        bool found = false;
        for (std::size_t f = 0; f < node.hist.size(); ++f) {
            const auto& bins = node.hist[f];
            if (bins.size() < 2) continue;
            double cg = 0, ch = 0;
            std::size_t cn = 0;
            for (std::size_t b = 0; b + 1 < bins.size(); ++b) {
                cg += bins[b].g;
                ch += bins[b].h;
                cn += bins[b].count;
                if (cn < params.min_data_in_leaf) continue;
                if (count - cn < params.min_data_in_leaf) break;
                const double rg = node.sum_g - cg;
                const double rh = node.sum_h - ch;
                const double dl = ch + lambda, dr = rh + lambda;
                if (dl <= 0 || dr <= 0) continue;
                const double gain =
                    0.5 * ((cg * cg) / dl + (rg * rg) / dr - parent_term);
                if (!found || gain > best.gain + kGainEps) {
                    best = SplitInfo{gain, f, b, binning.uppers[f][b], cg, ch, cn};
                    found = true;
                }
            }
        }
        if (found && best.gain > kGainEps) {
            node.best = best;
            node.has_best = true;
        }
    }

    void grow(std::span<const std::size_t> initial_rows) {
        rows.assign(initial_rows.begin(), initial_rows.end());
        nodes.clear();
        tree.nodes.clear();
        tree.nodes.emplace_back();

        BuildNode root;
        root.begin = 0;
        root.end = rows.size();
        root.depth = 0;
        root.tree_id = 0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            root.sum_g += grad[rows[k]];
            root.sum_h += hess[rows[k]];
        }
        root.hist = build_hist(root.begin, root.end);
        find_best(root);
        nodes.push_back(std::move(root));

        std::size_t n_leaves = 1;
        while (n_leaves < params.num_leaves) {
            int pick = -1;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                if (!nodes[k].open || !nodes[k].has_best) continue;
                if (pick < 0 || nodes[k].best.gain >
                                    nodes[static_cast<std::size_t>(pick)].best.gain + kGainEps)
                    pick = static_cast<int>(k);
            }
            if (pick < 0) break;
            split(static_cast<std::size_t>(pick));
            ++n_leaves;
        }

        // Frontier nodes become leaves.
        for (const auto& node : nodes) {
            if (!node.open) continue;
            tree.nodes[static_cast<std::size_t>(node.tree_id)].value =
                leaf_weight(node.sum_g, node.sum_h, params.leaf_l2);
        }
    }

    void split(std::size_t k) {
        // nodes may reallocate; take what we need by value first.
        const SplitInfo info = nodes[k].best;
        const std::size_t begin = nodes[k].begin, end = nodes[k].end;
        const std::size_t depth = nodes[k].depth;
        const int tree_id = nodes[k].tree_id;
        nodes[k].open = false;

        const auto* feature_bins = binned[info.feature].data();
        const auto mid_iter = std::stable_partition(
            rows.begin() + static_cast<std::ptrdiff_t>(begin),
            rows.begin() + static_cast<std::ptrdiff_t>(end),
            [&](std::size_t i) { return feature_bins[i] <= info.bin; });
        const std::size_t mid = static_cast<std::size_t>(mid_iter - rows.begin());

        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        RegTreeNode& parent = tree.nodes[static_cast<std::size_t>(tree_id)];
        parent.feature = static_cast<int>(info.feature);
        parent.threshold = info.threshold;
        parent.left = left_id;
        parent.right = right_id;
        parent.gain = info.gain;

        BuildNode left, right;
        left.begin = begin;
        left.end = mid;
        left.sum_g = info.left_g;
        left.sum_h = info.left_h;
        left.depth = depth + 1;
        left.tree_id = left_id;
        right.begin = mid;
        right.end = end;
        right.sum_g = nodes[k].sum_g - info.left_g;
        right.sum_h = nodes[k].sum_h - info.left_h;
        right.depth = depth + 1;
        right.tree_id = right_id;

        // Build the smaller side, derive the larger by subtraction.
        if (mid - begin <= end - mid) {
            left.hist = build_hist(left.begin, left.end);
            right.hist = std::move(nodes[k].hist);
            subtract_hist(right.hist, left.hist);
        } else {
            right.hist = build_hist(right.begin, right.end);
            left.hist = std::move(nodes[k].hist);
            subtract_hist(left.hist, right.hist);
        }
        nodes[k].hist.clear();

        find_best(left);
        find_best(right);
        nodes.push_back(std::move(left));
        nodes.push_back(std::move(right));
    }
};

}  // namespace

void GbmParams::validate() const {
    if (n_estimators < 0)
        throw Error::validation("gbm params: n_estimators must be >= 0");
    if (num_leaves < 2)
        throw Error::validation("gbm params: num_leaves must be >= 2");
    if (max_depth < 1)
        throw Error::validation("gbm params: max_depth must be >= 1");
    if (min_data_in_leaf < 1)
        throw Error::validation("gbm params: min_data_in_leaf must be >= 1");
    if (leaf_l2 < 0)
        throw Error::validation("gbm params: leaf_l2 must be >= 0");
    if (n_bins < 2)
        throw Error::validation("gbm params: n_bins must be >= 2");
    if (goss_top_fraction < 0 || goss_other_fraction < 0 ||
        goss_top_fraction + goss_other_fraction > 1.0 + 1e-12)
        throw Error::validation("gbm params: GOSS fractions must satisfy a + b <= 1");
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
    if (hess_sum < 0 || lambda < 0)
        throw Error::validation("leaf_weight: negative hessian sum or lambda");
    const double denom = hess_sum + lambda;
    if (denom <= 0)
        throw Error::validation("leaf_weight: H + lambda must be positive");
    return -grad_sum / denom;
}

std::pair<std::vector<std::size_t>, std::vector<double>> goss_sample(
    std::span<const double> gradient_magnitudes, double top_fraction, double other_fraction,
    Rng& rng) {
    if (top_fraction < 0 || other_fraction < 0 ||
        top_fraction + other_fraction > 1.0 + 1e-12)
        throw Error::validation("goss_sample: fractions must satisfy a + b <= 1");
    const std::size_t n = gradient_magnitudes.size();
    const std::size_t n_top =
        std::min(n, static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(n))));
    const std::size_t want_other =
        static_cast<std::size_t>(std::ceil(other_fraction * static_cast<double>(n)));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return gradient_magnitudes[a] > gradient_magnitudes[b];
    });

    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(n_top),
                                  order.end());
    std::sort(rest.begin(), rest.end());
    const std::size_t n_other = std::min(rest.size(), want_other);
    for (std::size_t i = 0; i < n_other; ++i) {
        const std::size_t j = i + uniform_index(rng, rest.size() - i);
        std::swap(rest[i], rest[j]);
    }

    struct Pick {
        std::size_t index;
        double weight;
    };
    std::vector<Pick> picks;
    picks.reserve(n_top + n_other);
    for (std::size_t i = 0; i < n_top; ++i) picks.push_back({order[i], 1.0});
    const double other_weight =
        other_fraction > 0 ? (1.0 - top_fraction) / other_fraction : 0.0;
    for (std::size_t i = 0; i < n_other; ++i) picks.push_back({rest[i], other_weight});
    std::sort(picks.begin(), picks.end(),
              [](const Pick& a, const Pick& b) { return a.index < b.index; });

    std::vector<std::size_t> indices(picks.size());
    std::vector<double> weights(picks.size());
    for (std::size_t i = 0; i < picks.size(); ++i) {
        indices[i] = picks[i].index;
        weights[i] = picks[i].weight;
    }
    return {std::move(indices), std::move(weights)};
}

std::vector<double> EfbPlan::apply(std::span<const double> row) const {
    std::vector<double> out(bundles.size(), 0.0);
    for (std::size_t b = 0; b < bundles.size(); ++b) {
        const EfbBundle& bundle = bundles[b];
        for (std::size_t m = 0; m < bundle.members.size(); ++m) {
            const double v = row[bundle.members[m]];
            if (v != 0.0) out[b] = bundle.offsets[m] + v;
        }
    }
    return out;
}

std::vector<double> EfbPlan::unapply(std::span<const double> merged) const {
    std::vector<double> out(n_input_features, 0.0);
    for (std::size_t b = 0; b < bundles.size(); ++b) {
        const EfbBundle& bundle = bundles[b];
        const double v = merged[b];
        if (v == 0.0) continue;
        for (std::size_t m = bundle.members.size(); m > 0; --m) {
            const std::size_t k = m - 1;
            if (v > bundle.offsets[k]) {
                out[bundle.members[k]] = v - bundle.offsets[k];
                break;
            }
        }
    }
    return out;
}

std::size_t EfbPlan::member_for_threshold(std::size_t bundle, double threshold) const {
    const EfbBundle& b = bundles[bundle];
    for (std::size_t m = b.members.size(); m > 0; --m) {
        const std::size_t k = m - 1;
        if (threshold > b.offsets[k]) return b.members[k];
    }
    return b.members.front();
}

EfbPlan efb_bundle(const Matrix& X, std::size_t max_conflict) {
    const std::size_t n = X.rows(), d = X.cols();
    EfbPlan plan;
    plan.n_input_features = d;

    std::vector<std::vector<char>> bundle_nonzero;  // per bundle, per row
    std::vector<bool> bundle_sealed;                // holds a negative-valued column

    for (std::size_t f = 0; f < d; ++f) {
        std::vector<char> nz(n, 0);
        bool negative = false;
        double max_value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = X(i, f);
            if (v != 0.0) nz[i] = 1;
            if (v < 0) negative = true;
            max_value = std::max(max_value, v);
        }

        int target = -1;
        if (!negative) {
            for (std::size_t b = 0; b < plan.bundles.size(); ++b) {
                if (bundle_sealed[b]) continue;
                std::size_t conflicts = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (nz[i] && bundle_nonzero[b][i]) ++conflicts;
                if (conflicts <= max_conflict) {
                    target = static_cast<int>(b);
                    break;
                }
            }
        }

        if (target < 0) {
            EfbBundle bundle;
            bundle.members = {f};
            bundle.offsets = {0.0};
            bundle.ranges = {max_value};
            plan.bundles.push_back(std::move(bundle));
            bundle_nonzero.push_back(std::move(nz));
            bundle_sealed.push_back(negative);
        } else {
            EfbBundle& bundle = plan.bundles[static_cast<std::size_t>(target)];
            const double offset =
                bundle.offsets.back() + bundle.ranges.back();
            bundle.members.push_back(f);
            bundle.offsets.push_back(offset);
            bundle.ranges.push_back(max_value);
            auto& bnz = bundle_nonzero[static_cast<std::size_t>(target)];
            for (std::size_t i = 0; i < n; ++i) bnz[i] |= nz[i];
        }
    }
    return plan;
}

std::vector<double> softmax(std::span<const double> scores) {
    double max_score = scores[0];
    for (double s : scores) max_score = std::max(max_score, s);
    std::vector<double> out(scores.size());
    double total = 0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        out[c] = std::exp(scores[c] - max_score);
        total += out[c];
    }
    for (double& v : out) v /= total;
    return out;
}

GbmModel fit_gbm(const Matrix& X, const LabelVector& y, const GbmParams& params,
                 std::size_t n_classes) {
    params.validate();
    const std::size_t n = X.rows();
    if (n == 0)
        throw Error::validation("fit_gbm: empty input");
    if (y.size() != n)
        throw Error::validation("fit_gbm: label count does not match row count");
    if (params.min_data_in_leaf > n)
        throw Error::validation("fit_gbm: min_data_in_leaf exceeds the row count");
    if (n_classes == 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = static_cast<std::size_t>(max_label) + 1;
    }
    if (n_classes < 2)
        throw Error::validation("fit_gbm: need at least 2 classes");

    GbmModel model;
    model.params = params;
    model.n_features = X.cols();
    model.n_classes = n_classes;
    model.importance.assign(X.cols(), 0.0);

    // Class log-priors; +1 smoothing when any class is absent.
    std::vector<double> counts(n_classes, 0.0);
    for (int label : y) counts[static_cast<std::size_t>(label)] += 1.0;
    bool absent = false;
    for (double c : counts)
        if (c == 0.0) absent = true;
    model.prior_scores.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        const double num = absent ? counts[c] + 1.0 : counts[c];
        const double den = absent ? static_cast<double>(n + n_classes)
                                  : static_cast<double>(n);
        model.prior_scores[c] = std::log(num / den);
    }

    // Optional feature bundling, then histogram binning of the training view.
    const Matrix* train = &X;
    Matrix merged;
    if (params.efb) {
        model.efb = efb_bundle(X, params.efb_max_conflict);
        merged = Matrix(n, model.efb->n_output_features());
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = model.efb->apply(X.row(i));
            for (std::size_t j = 0; j < row.size(); ++j) merged(i, j) = row[j];
        }
        train = &merged;
    }
    const std::size_t d = train->cols();
    const FeatureBinning binning = make_binning(*train, params.n_bins);
    std::vector<std::vector<std::uint16_t>> binned(d, std::vector<std::uint16_t>(n));
    for (std::size_t f = 0; f < d; ++f)
        for (std::size_t i = 0; i < n; ++i) binned[f][i] = binning.bin_of(f, (*train)(i, f));

    Matrix scores(n, n_classes);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < n_classes; ++c) scores(i, c) = model.prior_scores[c];

    std::vector<double> g(n), h(n), prob(n_classes);
    Matrix probs(n, n_classes);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), 0);

    for (std::size_t m = 0; m < params.n_estimators; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto p = softmax(scores.row(i));
            for (std::size_t c = 0; c < n_classes; ++c) probs(i, c) = p[c];
        }

        std::vector<std::size_t> kept = all_rows;
        std::vector<double> weights;
        if (params.goss) {
            std::vector<double> magnitude(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0;
                for (std::size_t c = 0; c < n_classes; ++c) {
                    const double gi =
                        probs(i, c) - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
                    s += std::fabs(gi);
                }
                magnitude[i] = s;
            }
            Rng rng(derive_seed(params.seed, m));
            auto [idx, w] = goss_sample(magnitude, params.goss_top_fraction,
                                        params.goss_other_fraction, rng);
            kept = std::move(idx);
            weights = std::move(w);
        }

        std::vector<char> in_partition(n, 0);
        for (std::size_t i : kept) in_partition[i] = 1;

        model.stages.emplace_back();
        auto& stage = model.stages.back();
        stage.reserve(n_classes);

        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double p = probs(i, c);
                g[i] = p - (y[i] == static_cast<int>(c) ? 1.0 : 0.0);
                h[i] = p * (1.0 - p);
            }
            if (!weights.empty()) {
                for (std::size_t k = 0; k < kept.size(); ++k) {
                    g[kept[k]] *= weights[k];
                    h[kept[k]] *= weights[k];
                }
            }

            TreeGrower grower{binned, binning, g, h, params, {}, {}, {}};
            grower.grow(kept);

            // Scores update straight from the partition; rows GOSS left out
            // are routed through the tree.
            for (const auto& node : grower.nodes) {
                if (!node.open) continue;
                const double delta =
                    params.learning_rate *
                    grower.tree.nodes[static_cast<std::size_t>(node.tree_id)].value;
                for (std::size_t k = node.begin; k < node.end; ++k)
                    scores(grower.rows[k], c) += delta;
            }
            if (kept.size() != n) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (in_partition[i]) continue;
                    scores(i, c) +=
                        params.learning_rate * grower.tree.predict(train->row(i));
                }
            }

            for (const auto& node : grower.tree.nodes) {
                if (node.feature < 0) continue;
                std::size_t raw = static_cast<std::size_t>(node.feature);
                if (model.efb)
                    raw = model.efb->member_for_threshold(raw, node.threshold);
                model.importance[raw] += node.gain;
            }
            stage.push_back(std::move(grower.tree));
        }
    }
    return model;
}

std::vector<double> gbm_scores(const GbmModel& model, std::span<const double> row,
                               std::size_t n_stages) {
    if (row.size() != model.n_features)
        throw Error::validation("gbm_predict: row width does not match the model");
    if (n_stages > model.stages.size())
        throw Error::validation("gbm_scores: stage count out of range");
    std::vector<double> merged_storage;
    std::span<const double> view = row;
    if (model.efb) {
        merged_storage = model.efb->apply(row);
        view = merged_storage;
    }
    std::vector<double> scores = model.prior_scores;
    for (std::size_t m = 0; m < n_stages; ++m)
        for (std::size_t c = 0; c < model.n_classes; ++c)
            scores[c] += model.params.learning_rate * model.stages[m][c].predict(view);
    return scores;
}

std::pair<int, std::vector<double>> gbm_predict(const GbmModel& model,
                                                std::span<const double> row) {
    const auto scores = gbm_scores(model, row, model.stages.size());
    auto proba = softmax(scores);
    const int cls = static_cast<int>(std::max_element(proba.begin(), proba.end()) -
                                     proba.begin());
    return {cls, std::move(proba)};
}

}  // namespace loskit
