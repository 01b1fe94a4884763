#include "loskit/model.hpp"

#include <algorithm>
#include <numeric>

#include "loskit/error.hpp"

namespace loskit {

std::string model_family_name(ModelFamily family) {
    switch (family) {
        case ModelFamily::tree: return "tree";
        case ModelFamily::forest: return "forest";
        case ModelFamily::adaboost: return "adaboost";
        case ModelFamily::gbm: return "gbm";
        case ModelFamily::logistic: return "logistic";
    }
    return "?";
}

ModelFamily model_family_from_name(const std::string& name) {
    if (name == "tree") return ModelFamily::tree;
    if (name == "forest") return ModelFamily::forest;
    if (name == "adaboost") return ModelFamily::adaboost;
    if (name == "gbm") return ModelFamily::gbm;
    if (name == "logistic") return ModelFamily::logistic;
    throw Error::validation("unknown model family: " + name);
}

ModelFamily family_of(const Model& model) {
    return static_cast<ModelFamily>(model.index());
}

int predict_class(const Model& model, std::span<const double> row) {
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) return tree_predict_class(m, row);
            else if constexpr (std::is_same_v<T, ForestModel>) return forest_predict(m, row);
            else if constexpr (std::is_same_v<T, AdaBoostModel>) return adaboost_predict(m, row);
            else if constexpr (std::is_same_v<T, GbmModel>) return gbm_predict(m, row).first;
            else return logistic_predict(m, row);
        },
        model);
}

std::vector<int> predict_classes(const Model& model, const Matrix& X) {
    std::vector<int> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_class(model, X.row(i));
    return out;
}

namespace {

std::vector<double> normalized(std::vector<double> v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total > 0)
        for (double& x : v) x /= total;
    return v;
}

// Mean of the members' normalized importances.
std::vector<double> ensemble_importance(const std::vector<const std::vector<double>*>& members,
                                        std::size_t d) {
    std::vector<double> mean(d, 0.0);
    for (const auto* imp : members) {
        const auto norm = normalized(*imp);
        for (std::size_t j = 0; j < d; ++j) mean[j] += norm[j];
    }
    for (double& x : mean) x /= static_cast<double>(members.size());
    return mean;
}

}  // namespace

ImportanceReport feature_importance(const Model& model,
                                    const std::vector<std::string>& feature_names) {
    std::vector<double> raw;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                raw = m.importance;
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                std::vector<const std::vector<double>*> members;
                for (const auto& t : m.trees) members.push_back(&t.importance);
                raw = ensemble_importance(members, m.n_features);
            } else if constexpr (std::is_same_v<T, AdaBoostModel>) {
                std::vector<const std::vector<double>*> members;
                for (const auto& s : m.stages) members.push_back(&s.tree.importance);
                raw = ensemble_importance(members, m.n_features);
            } else if constexpr (std::is_same_v<T, GbmModel>) {
                raw = m.importance;
            } else {
                throw Error::validation(
                    "feature_importance: not defined for logistic models");
            }
        },
        model);

    if (feature_names.size() != raw.size())
        throw Error::validation("feature_importance: name count does not match the model");

    ImportanceReport rep;
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    rep.all_zero = total <= 0;
    if (!rep.all_zero)
        for (double& x : raw) x /= total;

    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
    for (std::size_t j : order) rep.scores.emplace_back(feature_names[j], raw[j]);
    return rep;
}

}  // namespace loskit
