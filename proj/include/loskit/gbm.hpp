#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loskit/matrix.hpp"
#include "loskit/rng.hpp"

namespace loskit {

struct GbmParams {
    std::size_t n_estimators = 100;   // boosting stages M
    double learning_rate = 0.1;       // eta
    std::size_t max_depth = 10;
    std::size_t num_leaves = 31;
    std::size_t min_data_in_leaf = 20;
    double leaf_l2 = 1.0;             // lambda in the split gain and leaf weight
    std::size_t n_bins = 255;         // histogram bins per feature
    bool goss = false;
    double goss_top_fraction = 0.2;   // a: kept by gradient magnitude
    double goss_other_fraction = 0.1; // b: sampled from the rest, re-weighted
    bool efb = false;
    std::size_t efb_max_conflict = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Regression tree with leaf weights; thresholds are real values, so
// prediction does not depend on the training-time binning.
struct RegTreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0;  // leaf weight
    double gain = 0;   // split gain, kept for importances
};

struct RegTree {
    std::vector<RegTreeNode> nodes;

    double predict(std::span<const double> row) const {
        const RegTreeNode* node = &nodes[0];
        while (node->feature >= 0) {
            node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                       ? &nodes[static_cast<std::size_t>(node->left)]
                       : &nodes[static_cast<std::size_t>(node->right)];
        }
        return node->value;
    }
};

// Exclusive feature bundling: nearly mutually-exclusive columns share one
// merged column, each member occupying a disjoint offset range.
struct EfbBundle {
    std::vector<std::size_t> members;
    std::vector<double> offsets;  // per member; merged value = offset + raw value
    std::vector<double> ranges;   // per member; max observed raw value
};

struct EfbPlan {
    std::vector<EfbBundle> bundles;
    std::size_t n_input_features = 0;

    std::size_t n_output_features() const noexcept { return bundles.size(); }
    // Merges one raw row into bundle space.
    std::vector<double> apply(std::span<const double> row) const;
    // Inverse of apply when no member conflicts occurred on the row.
    std::vector<double> unapply(std::span<const double> merged) const;
    // Input feature owning the given threshold position of a bundle column.
    std::size_t member_for_threshold(std::size_t bundle, double threshold) const;
};

struct GbmModel {
    GbmParams params;
    std::size_t n_features = 0;  // raw input features
    std::size_t n_classes = 0;
    std::vector<double> prior_scores;        // K log-priors
    std::vector<std::vector<RegTree>> stages;  // M stages x K trees
    std::optional<EfbPlan> efb;
    std::vector<double> importance;          // per raw feature, summed split gains

    std::size_t n_stages() const noexcept { return stages.size(); }
};

// Optimal weight of a leaf under the second-order objective: -G / (H + lambda).
double leaf_weight(double grad_sum, double hess_sum, double lambda);

// Keep the ceil(a*n) largest-magnitude gradients; sample ceil(b*n) of the
// rest uniformly, each weighted (1-a)/b. Returns (kept indices ascending,
// weight per kept index).
std::pair<std::vector<std::size_t>, std::vector<double>> goss_sample(
    std::span<const double> gradient_magnitudes, double top_fraction, double other_fraction,
    Rng& rng);

// Greedy bundling; two features conflict when both are nonzero on a row.
// A feature joins a bundle only if its added conflicts stay within
// max_conflict. Columns with negative values never bundle.
EfbPlan efb_bundle(const Matrix& X, std::size_t max_conflict);

// Softmax-objective boosting: per stage and class, gradients
// g_i = p_ic - [y_i = c] and hessians h_i = p_ic (1 - p_ic) feed histogram
// trees grown leaf-wise by best split gain.
GbmModel fit_gbm(const Matrix& X, const LabelVector& y, const GbmParams& params,
                 std::size_t n_classes = 0);

// Per-class scores after the first n_stages stages (Eq. style accumulation).
std::vector<double> gbm_scores(const GbmModel& model, std::span<const double> row,
                               std::size_t n_stages);

// (argmax class, softmax probabilities) using all stages.
std::pair<int, std::vector<double>> gbm_predict(const GbmModel& model,
                                                std::span<const double> row);

std::vector<double> softmax(std::span<const double> scores);

}  // namespace loskit
