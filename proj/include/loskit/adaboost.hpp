#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loskit/tree.hpp"

namespace loskit {

struct AdaBoostParams {
    std::size_t n_estimators = 50;
    double learning_rate = 1.0;
    std::size_t base_max_depth = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct AdaBoostStage {
    TreeModel tree;
    double alpha = 0;
};

struct AdaBoostModel {
    std::vector<AdaBoostStage> stages;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    AdaBoostParams params;
};

// Per-stage trace for tests and the run log.
struct AdaBoostFitInfo {
    struct Stage {
        double epsilon = 0;
        double alpha = 0;
        std::vector<double> weights_after;  // sample distribution entering the next stage
    };
    std::vector<Stage> stages;
    bool stopped_early = false;
};

// Multiclass stagewise boosting. Stage weight
//   alpha = learning_rate * (ln((1-eps)/eps) + ln(K-1)),
// misclassified sample weights scale by exp(alpha) and renormalize.
// eps = 0 keeps the stage with alpha capped at learning_rate*ln(1e12) and
// stops; eps >= 1 - 1/K discards the stage and stops.
AdaBoostModel fit_adaboost(const Matrix& X, const LabelVector& y, const AdaBoostParams& params,
                           AdaBoostFitInfo* info = nullptr, std::size_t n_classes = 0);

// argmax over classes of the alpha-weighted stage votes; ties go low.
int adaboost_predict(const AdaBoostModel& model, std::span<const double> row);

std::vector<double> adaboost_votes(const AdaBoostModel& model, std::span<const double> row);

}  // namespace loskit
