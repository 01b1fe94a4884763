#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loskit/adaboost.hpp"
#include "loskit/forest.hpp"
#include "loskit/gbm.hpp"
#include "loskit/logistic.hpp"
#include "loskit/tree.hpp"

namespace loskit {

// The five classifier families share one predict contract.
using Model = std::variant<TreeModel, ForestModel, AdaBoostModel, GbmModel, LogisticModel>;

enum class ModelFamily { tree, forest, adaboost, gbm, logistic };

std::string model_family_name(ModelFamily family);
ModelFamily model_family_from_name(const std::string& name);
ModelFamily family_of(const Model& model);

int predict_class(const Model& model, std::span<const double> row);
std::vector<int> predict_classes(const Model& model, const Matrix& X);

struct ImportanceReport {
    // (feature name, normalized score), descending.
    std::vector<std::pair<std::string, double>> scores;
    bool all_zero = false;
};

// Normalized split-importance ranking. Ensembles average member importances
// before normalizing. Unavailable for logistic models.
ImportanceReport feature_importance(const Model& model,
                                    const std::vector<std::string>& feature_names);

}  // namespace loskit
