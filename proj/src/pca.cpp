#include "loskit/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loskit/error.hpp"

namespace loskit {

std::pair<std::vector<double>, Matrix> jacobi_eigen(const Matrix& sym) {
    const std::size_t d = sym.rows();
    if (sym.cols() != d)
        throw Error::validation("jacobi_eigen: matrix not square");
    Matrix a = sym;
    Matrix v(d, d);
    for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-14 * scale;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) off += std::fabs(a(p, q));
        if (off <= tol) break;

        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) <= tol * 1e-3) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v(p, k), vkq = v(q, k);
                    v(p, k) = c * vkp - s * vkq;
                    v(q, k) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<double> eigenvalues(d);
    for (std::size_t i = 0; i < d; ++i) eigenvalues[i] = a(i, i);
    return {std::move(eigenvalues), std::move(v)};
}

PcaModel fit_pca(const FeatureMatrix& X) {
    const std::size_t n = X.n_rows(), d = X.n_features();
    if (n < 2)
        throw Error::validation("fit_pca: need at least 2 rows");
    X.validate();

    PcaModel model;
    model.means.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += X.values(i, j);
        model.means[j] = s / static_cast<double>(n);
    }

    Matrix cov(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i)
                s += (X.values(i, a) - model.means[a]) * (X.values(i, b) - model.means[b]);
            cov(a, b) = cov(b, a) = s / static_cast<double>(n);
        }
    }

    auto [eigenvalues, vectors] = jacobi_eigen(cov);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return eigenvalues[l] > eigenvalues[r];
    });

    model.components = Matrix(d, d);
    model.explained_variance.resize(d);
    double total = 0;
    for (std::size_t r = 0; r < d; ++r) {
        const std::size_t src = order[r];
        model.explained_variance[r] = std::max(eigenvalues[src], 0.0);
        total += model.explained_variance[r];
        // Sign convention: largest-magnitude entry non-negative.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::fabs(vectors(src, j)) > std::fabs(vectors(src, arg))) arg = j;
        const double sign = vectors(src, arg) < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) model.components(r, j) = sign * vectors(src, j);
    }

    model.explained_ratio.assign(d, 0.0);
    if (total > 0) {
        for (std::size_t r = 0; r < d; ++r)
            model.explained_ratio[r] = model.explained_variance[r] / total;
    } else {
        model.degenerate = true;
    }
    return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& X, std::size_t k) {
    const std::size_t d = model.n_features();
    if (k < 1 || k > d)
        throw Error::validation("pca_transform: k out of range");
    if (X.n_features() != d)
        throw Error::validation("pca_transform: feature count does not match the model");

    FeatureMatrix out;
    out.values = Matrix(X.n_rows(), k);
    for (std::size_t c = 0; c < k; ++c) out.feature_names.push_back("pc" + std::to_string(c + 1));
    for (std::size_t i = 0; i < X.n_rows(); ++i) {
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0;
            for (std::size_t j = 0; j < d; ++j)
                s += (X.values(i, j) - model.means[j]) * model.components(c, j);
            out.values(i, c) = s;
        }
    }
    return out;
}

FeatureMatrix pca_inverse(const PcaModel& model, const FeatureMatrix& scores) {
    const std::size_t d = model.n_features();
    const std::size_t k = scores.n_features();
    if (k > d)
        throw Error::validation("pca_inverse: score width exceeds the model dimension");

    FeatureMatrix out;
    out.values = Matrix(scores.n_rows(), d);
    for (std::size_t j = 0; j < d; ++j) out.feature_names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < scores.n_rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = model.means[j];
            for (std::size_t c = 0; c < k; ++c)
                s += scores.values(i, c) * model.components(c, j);
            out.values(i, j) = s;
        }
    }
    return out;
}

std::size_t select_components(const std::vector<double>& explained_ratio, double threshold) {
    if (!(threshold > 0.0) || threshold > 1.0)
        throw Error::validation("select_components: threshold must be in (0, 1]");
    double sum = 0;
    for (double r : explained_ratio) sum += r;
    if (std::fabs(sum - 1.0) > 1e-6)
        throw Error::validation("select_components: ratios do not sum to 1");
    double cum = 0;
    for (std::size_t k = 0; k < explained_ratio.size(); ++k) {
        cum += explained_ratio[k];
        if (cum >= threshold - 1e-12) return k + 1;
    }
    return explained_ratio.size();
}

}  // namespace loskit
