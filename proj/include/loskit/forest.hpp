#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loskit/tree.hpp"

namespace loskit {

struct ForestParams {
    std::size_t n_estimators = 100;
    TreeParams tree;
    bool bootstrap = true;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    ForestParams params;
};

// Each tree trains on a seeded bootstrap resample (when enabled) with the
// per-split feature subsampling the tree params declare. Tree seeds derive
// deterministically from (seed, tree index).
ForestModel fit_forest(const Matrix& X, const LabelVector& y, const ForestParams& params,
                       std::size_t n_classes = 0);

// Majority vote; ties go to the smallest class index.
int forest_predict(const ForestModel& model, std::span<const double> row);

// Raw per-class vote counts.
std::vector<double> forest_votes(const ForestModel& model, std::span<const double> row);

}  // namespace loskit
