#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "loskit/matrix.hpp"

namespace loskit {

struct LogisticParams {
    double C = 1.0;  // inverse regularization strength; penalty is L2
    std::size_t max_iter = 100;
    double tol = 1e-8;

    void validate() const;
};

// One-vs-rest binary models; row c scores class c.
struct LogisticModel {
    Matrix weights;  // K x d
    std::vector<double> intercepts;
    LogisticParams params;

    std::size_t n_classes() const noexcept { return weights.rows(); }
    std::size_t n_features() const noexcept { return weights.cols(); }
};

// Per-class optimizer trace, for tests and the run log.
struct LogisticFitInfo {
    struct PerClass {
        std::vector<double> objective;  // value after each iteration (non-increasing)
        double final_grad_norm = 0;
        std::size_t iterations = 0;
    };
    std::vector<PerClass> classes;
};

// Newton iterations with backtracking line search on the L2-regularized
// negative log-likelihood (penalty 1/C on weights, never on the intercept).
// Stops when the objective change drops below tol or max_iter is reached.
LogisticModel fit_logistic(const Matrix& X, const LabelVector& y, const LogisticParams& params,
                           LogisticFitInfo* info = nullptr, std::size_t n_classes = 0);

// Per-class sigmoid scores normalized to sum to 1.
std::vector<double> logistic_predict_proba(const LogisticModel& model,
                                           std::span<const double> row);

int logistic_predict(const LogisticModel& model, std::span<const double> row);

}  // namespace loskit
