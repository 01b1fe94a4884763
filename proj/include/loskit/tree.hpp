#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loskit/matrix.hpp"
#include "loskit/rng.hpp"

namespace loskit {

enum class Criterion { entropy, gini };

std::string criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

// Number of candidate features examined per split.
struct MaxFeatures {
    enum class Mode { all, sqrt_of_d, count };
    Mode mode = Mode::all;
    std::size_t count = 0;

    static MaxFeatures all() { return {Mode::all, 0}; }
    static MaxFeatures sqrt_of_d() { return {Mode::sqrt_of_d, 0}; }
    static MaxFeatures exact(std::size_t n) { return {Mode::count, n}; }

    std::size_t resolve(std::size_t d) const;
};

struct TreeParams {
    Criterion criterion = Criterion::gini;
    std::size_t max_depth = std::numeric_limits<std::size_t>::max();
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    MaxFeatures max_features = MaxFeatures::all();
    std::uint64_t seed = 0;

    void validate() const;
};

// Impurity of a class-proportion vector: -sum p_c log2 p_c, with 0 log 0 = 0.
double entropy(std::span<const double> proportions);

// 1 - sum p_c^2.
double gini(std::span<const double> proportions);

// Parent impurity minus child-size-weighted child impurities, from class
// counts. left + right must equal parent elementwise.
double information_gain(std::span<const double> parent_counts,
                        std::span<const double> left_counts,
                        std::span<const double> right_counts, Criterion criterion);

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0;
    double gain = 0;
};

// Internal nodes carry (feature, threshold, children); leaves carry weighted
// class counts and the argmax class.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::vector<double> class_counts;
    int predicted_class = -1;

    bool is_leaf() const noexcept { return feature < 0; }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // preorder; nodes[0] is the root
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    TreeParams params;
    std::vector<double> importance;  // per feature, summed weighted impurity decreases

    std::size_t n_leaves() const;
};

// Best (feature, threshold) by information gain over the rows in `idx`.
// Thresholds are midpoints between consecutive distinct sorted values.
// Ties break toward the smallest feature index, then the smallest threshold.
// Returns nullopt when no split has positive gain or min_samples_leaf would
// be violated on every candidate.
std::optional<SplitCandidate> best_split(const Matrix& X, const LabelVector& y,
                                         std::span<const double> weights,
                                         std::span<const std::int32_t> idx,
                                         std::size_t n_classes, const TreeParams& params,
                                         Rng& rng);

// Greedy recursive growth. Optional per-sample weights (boosting); empty
// means unweighted. n_classes = 0 infers max(y)+1.
TreeModel fit_tree(const Matrix& X, const LabelVector& y, const TreeParams& params,
                   std::span<const double> weights = {}, std::size_t n_classes = 0);

// Routes by `value <= threshold goes left`; returns (class, probabilities).
std::pair<int, std::vector<double>> tree_predict(const TreeModel& model,
                                                 std::span<const double> row);

int tree_predict_class(const TreeModel& model, std::span<const double> row);

}  // namespace loskit
