#include "loskit/adaboost.hpp"

#include <algorithm>
#include <cmath>

#include "loskit/error.hpp"
#include "loskit/rng.hpp"

namespace loskit {

namespace {
// Cap for the eps = 0 stage weight, before the learning-rate factor.
const double kMaxStageLogOdds = std::log(1e12);
}

void AdaBoostParams::validate() const {
    if (n_estimators < 1)
        throw Error::validation("adaboost params: n_estimators must be >= 1");
    if (!(learning_rate > 0))
        throw Error::validation("adaboost params: learning_rate must be positive");
    if (base_max_depth < 1)
        throw Error::validation("adaboost params: base_max_depth must be >= 1");
}

AdaBoostModel fit_adaboost(const Matrix& X, const LabelVector& y, const AdaBoostParams& params,
                           AdaBoostFitInfo* info, std::size_t n_classes) {
    params.validate();
    const std::size_t n = X.rows();
    if (n == 0)
        throw Error::validation("fit_adaboost: empty input");
    if (n_classes == 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = static_cast<std::size_t>(max_label) + 1;
    }
    if (n_classes < 2)
        throw Error::validation("fit_adaboost: need at least 2 classes");
    {
        std::vector<std::size_t> counts(n_classes, 0);
        for (int label : y) ++counts[static_cast<std::size_t>(label)];
        std::size_t present = 0;
        for (std::size_t c : counts)
            if (c > 0) ++present;
        if (present < 2)
            throw Error::runtime("fit_adaboost: degenerate one-class labels");
    }

    AdaBoostModel model;
    model.n_features = X.cols();
    model.n_classes = n_classes;
    model.params = params;

    std::vector<double> weights(n, 1.0 / static_cast<double>(n));
    const double chance = 1.0 - 1.0 / static_cast<double>(n_classes);

    TreeParams base;
    base.criterion = Criterion::gini;
    base.max_depth = params.base_max_depth;
    base.min_samples_split = 2;
    base.min_samples_leaf = 1;
    base.max_features = MaxFeatures::all();

    for (std::size_t m = 0; m < params.n_estimators; ++m) {
        base.seed = derive_seed(params.seed, m);
        TreeModel tree = fit_tree(X, y, base, weights, n_classes);

        double eps = 0;
        std::vector<char> wrong(n);
        for (std::size_t i = 0; i < n; ++i) {
            wrong[i] = tree_predict_class(tree, X.row(i)) != y[i] ? 1 : 0;
            if (wrong[i]) eps += weights[i];
        }

        if (eps >= chance) {
            // No better than chance: discard and stop.
            if (info) info->stopped_early = true;
            break;
        }

        double log_odds;
        bool perfect = false;
        if (eps <= 0) {
            log_odds = kMaxStageLogOdds;
            perfect = true;
        } else {
            log_odds = std::log((1.0 - eps) / eps) +
                       std::log(static_cast<double>(n_classes) - 1.0);
        }
        const double alpha = params.learning_rate * log_odds;
        model.stages.push_back({std::move(tree), alpha});

        double total = 0;
        const double up = std::exp(alpha);
        for (std::size_t i = 0; i < n; ++i) {
            if (wrong[i]) weights[i] *= up;
            total += weights[i];
        }
        for (double& w : weights) w /= total;

        if (info) {
            AdaBoostFitInfo::Stage s;
            s.epsilon = eps;
            s.alpha = alpha;
            s.weights_after = weights;
            info->stages.push_back(std::move(s));
        }
        if (perfect) {
            if (info) info->stopped_early = true;
            break;
        }
    }

    if (model.stages.empty())
        throw Error::runtime("fit_adaboost: no stage better than chance");
    return model;
}

std::vector<double> adaboost_votes(const AdaBoostModel& model, std::span<const double> row) {
    if (row.size() != model.n_features)
        throw Error::validation("adaboost_predict: row width does not match the model");
    std::vector<double> votes(model.n_classes, 0.0);
    for (const auto& stage : model.stages)
        votes[static_cast<std::size_t>(tree_predict_class(stage.tree, row))] += stage.alpha;
    return votes;
}

int adaboost_predict(const AdaBoostModel& model, std::span<const double> row) {
    const auto votes = adaboost_votes(model, row);
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace loskit
