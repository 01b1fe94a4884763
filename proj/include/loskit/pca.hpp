#pragma once

#include <cstddef>
#include <vector>

#include "loskit/matrix.hpp"

namespace loskit {

// Principal directions of the centered data, sorted by descending variance.
// Variances use the population (1/n) convention, matching the standardizer.
struct PcaModel {
    std::vector<double> means;              // d
    Matrix components;                      // d x d, row i = i-th principal direction
    std::vector<double> explained_variance; // descending, >= 0
    std::vector<double> explained_ratio;    // sums to 1 (all zero when degenerate)
    bool degenerate = false;                // total variance is zero

    std::size_t n_features() const noexcept { return means.size(); }
};

// Eigendecomposition of the covariance of the centered input. Sign convention:
// the largest-magnitude entry of each component is non-negative.
PcaModel fit_pca(const FeatureMatrix& X);

// Projects (X - means) onto the first k components. Output columns pc1..pck.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& X, std::size_t k);

// Maps scores back through the component rows and re-adds the means.
FeatureMatrix pca_inverse(const PcaModel& model, const FeatureMatrix& scores);

// Smallest k whose cumulative explained ratio reaches the threshold.
std::size_t select_components(const std::vector<double>& explained_ratio, double threshold);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns (eigenvalues, eigenvectors as rows), unsorted.
std::pair<std::vector<double>, Matrix> jacobi_eigen(const Matrix& sym);

}  // namespace loskit
