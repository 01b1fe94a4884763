#include "loskit/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "loskit/error.hpp"

namespace loskit {

namespace {

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double sigmoid(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Cholesky solve of an SPD system; A is overwritten with its factor.
std::vector<double> cholesky_solve(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
        if (diag <= 0)
            throw Error::runtime("logistic: Hessian not positive definite");
        a(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
            a(i, j) = v / a(j, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a(i, k) * b[k];
        b[i] = v / a(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= a(k, i) * b[k];
        b[i] = v / a(i, i);
    }
    return b;
}

// Binary L2-penalized logistic fit for targets t in {0,1}. Parameter vector is
// (w_0..w_{d-1}, b); the intercept is unpenalized.
struct BinarySolver {
    const Matrix& X;
    const std::vector<char>& t;
    double inv_c;  // 1/C
    std::size_t n, d;

    double objective(const std::vector<double>& wb, std::vector<double>& z) const {
        double obj = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = wb[d];
            for (std::size_t j = 0; j < d; ++j) s += X(i, j) * wb[j];
            z[i] = s;
            obj += log1pexp(s) - (t[i] ? s : 0.0);
        }
        double reg = 0;
        for (std::size_t j = 0; j < d; ++j) reg += wb[j] * wb[j];
        return obj + 0.5 * inv_c * reg;
    }

    void gradient(const std::vector<double>& wb, const std::vector<double>& z,
                  std::vector<double>& g) const {
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = sigmoid(z[i]) - (t[i] ? 1.0 : 0.0);
            for (std::size_t j = 0; j < d; ++j) g[j] += r * X(i, j);
            g[d] += r;
        }
        for (std::size_t j = 0; j < d; ++j) g[j] += inv_c * wb[j];
    }

    Matrix hessian(const std::vector<double>& z) const {
        Matrix h(d + 1, d + 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(z[i]);
            const double s = p * (1.0 - p);
            if (s == 0.0) continue;
            for (std::size_t a = 0; a < d; ++a) {
                const double xa = s * X(i, a);
                for (std::size_t b = a; b < d; ++b) h(a, b) += xa * X(i, b);
                h(a, d) += xa;
            }
            h(d, d) += s;
        }
        for (std::size_t a = 0; a < d; ++a) h(a, a) += inv_c;
        h(d, d) += 1e-10;  // keeps the factorization defined on saturated fits
        for (std::size_t a = 0; a < d + 1; ++a)
            for (std::size_t b = 0; b < a; ++b) h(a, b) = h(b, a);
        return h;
    }

    // Converged = objective change < tol with the gradient norm settled below
    // 10*tol; the extra gradient condition costs at most a couple of Newton
    // iterations and keeps saturated one-vs-rest problems honest.
    void solve(std::size_t max_iter, double tol, std::vector<double>& wb,
               LogisticFitInfo::PerClass* trace) const {
        std::vector<double> z(n), g(d + 1);
        double obj = objective(wb, z);
        if (trace) trace->objective.push_back(obj);
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            gradient(wb, z, g);
            std::vector<double> step = cholesky_solve(hessian(z), g);
            double desc = 0;
            for (std::size_t j = 0; j <= d; ++j) desc += g[j] * step[j];

            double alpha = 1.0;
            std::vector<double> trial(d + 1);
            double new_obj = obj;
            std::vector<double> zt(n);
            bool moved = false;
            while (alpha >= 1e-12) {
                for (std::size_t j = 0; j <= d; ++j) trial[j] = wb[j] - alpha * step[j];
                new_obj = objective(trial, zt);
                if (new_obj <= obj - 1e-4 * alpha * desc) {
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!moved) break;
            wb = trial;
            z = zt;
            if (trace) {
                trace->objective.push_back(new_obj);
                trace->iterations = iter + 1;
            }
            const double change = obj - new_obj;
            obj = new_obj;
            if (change < tol) {
                gradient(wb, z, g);
                double norm = 0;
                for (double v : g) norm += v * v;
                if (std::sqrt(norm) <= 10.0 * tol) break;
            }
        }
        if (trace) {
            gradient(wb, z, g);
            double norm = 0;
            for (double v : g) norm += v * v;
            trace->final_grad_norm = std::sqrt(norm);
        }
    }
};

}  // namespace

void LogisticParams::validate() const {
    if (!(C > 0))
        throw Error::validation("logistic params: C must be positive");
    if (!(tol > 0))
        throw Error::validation("logistic params: tol must be positive");
}

LogisticModel fit_logistic(const Matrix& X, const LabelVector& y, const LogisticParams& params,
                           LogisticFitInfo* info, std::size_t n_classes) {
    params.validate();
    const std::size_t n = X.rows(), d = X.cols();
    if (y.size() != n)
        throw Error::validation("fit_logistic: label count does not match row count");
    if (!X.all_finite())
        throw Error::validation("fit_logistic: non-finite feature value");
    if (n_classes == 0) {
        int max_label = 0;
        for (int label : y) max_label = std::max(max_label, label);
        n_classes = static_cast<std::size_t>(max_label) + 1;
    }
    if (n < n_classes)
        throw Error::validation("fit_logistic: need at least K rows");

    std::vector<std::size_t> class_counts(n_classes, 0);
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= n_classes)
            throw Error::validation("fit_logistic: label out of range");
        ++class_counts[static_cast<std::size_t>(label)];
    }
    std::size_t present = 0;
    for (std::size_t c : class_counts)
        if (c > 0) ++present;
    if (present < 2)
        throw Error::runtime("fit_logistic: degenerate one-class fit");

    LogisticModel model;
    model.weights = Matrix(n_classes, d);
    model.intercepts.assign(n_classes, 0.0);
    model.params = params;
    if (info) info->classes.resize(n_classes);

    for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<char> targets(n);
        for (std::size_t i = 0; i < n; ++i)
            targets[i] = y[i] == static_cast<int>(c) ? 1 : 0;
        BinarySolver solver{X, targets, 1.0 / params.C, n, d};
        std::vector<double> wb(d + 1, 0.0);
        solver.solve(params.max_iter, params.tol, wb,
                     info ? &info->classes[c] : nullptr);
        for (std::size_t j = 0; j < d; ++j) model.weights(c, j) = wb[j];
        model.intercepts[c] = wb[d];
    }
    return model;
}

std::vector<double> logistic_predict_proba(const LogisticModel& model,
                                           std::span<const double> row) {
    const std::size_t k = model.n_classes(), d = model.n_features();
    if (row.size() != d)
        throw Error::validation("logistic_predict: row width does not match the model");
    std::vector<double> scores(k);
    double total = 0;
    for (std::size_t c = 0; c < k; ++c) {
        double z = model.intercepts[c];
        for (std::size_t j = 0; j < d; ++j) z += model.weights(c, j) * row[j];
        scores[c] = sigmoid(z);
        total += scores[c];
    }
    if (total == 0.0) {
        std::fill(scores.begin(), scores.end(), 1.0 / static_cast<double>(k));
        return scores;
    }
    for (double& s : scores) s /= total;
    return scores;
}

int logistic_predict(const LogisticModel& model, std::span<const double> row) {
    const auto proba = logistic_predict_proba(model, row);
    return static_cast<int>(std::max_element(proba.begin(), proba.end()) - proba.begin());
}

}  // namespace loskit
