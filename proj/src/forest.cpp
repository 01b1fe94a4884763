#include "loskit/forest.hpp"

#include <algorithm>

#include "loskit/error.hpp"
#include "loskit/rng.hpp"

namespace loskit {

void ForestParams::validate() const {
    if (n_estimators < 1)
        throw Error::validation("forest params: n_estimators must be >= 1");
    tree.validate();
}

ForestModel fit_forest(const Matrix& X, const LabelVector& y, const ForestParams& params,
                       std::size_t n_classes) {
    params.validate();
    const std::size_t n = X.rows();
    if (n == 0)
        throw Error::validation("fit_forest: empty input");
    if (n_classes == 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = static_cast<std::size_t>(max_label) + 1;
    }

    ForestModel model;
    model.n_features = X.cols();
    model.n_classes = n_classes;
    model.params = params;
    model.trees.reserve(params.n_estimators);

    for (std::size_t t = 0; t < params.n_estimators; ++t) {
        const std::uint64_t tree_stream = derive_seed(params.seed, t);
        TreeParams tp = params.tree;
        tp.seed = derive_seed(tree_stream, 1);

        if (params.bootstrap) {
            Rng boot(derive_seed(tree_stream, 0));
            Matrix xs(n, X.cols());
            LabelVector ys(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t src = uniform_index(boot, n);
                for (std::size_t j = 0; j < X.cols(); ++j) xs(i, j) = X(src, j);
                ys[i] = y[src];
            }
            model.trees.push_back(fit_tree(xs, ys, tp, {}, n_classes));
        } else {
            model.trees.push_back(fit_tree(X, y, tp, {}, n_classes));
        }
    }
    return model;
}

std::vector<double> forest_votes(const ForestModel& model, std::span<const double> row) {
    if (row.size() != model.n_features)
        throw Error::validation("forest_predict: row width does not match the model");
    std::vector<double> votes(model.n_classes, 0.0);
    for (const auto& tree : model.trees)
        votes[static_cast<std::size_t>(tree_predict_class(tree, row))] += 1.0;
    return votes;
}

int forest_predict(const ForestModel& model, std::span<const double> row) {
    const auto votes = forest_votes(model, row);
    return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

}  // namespace loskit
