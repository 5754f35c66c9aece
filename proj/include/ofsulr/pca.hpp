#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ofsulr/matrix.hpp"

namespace ofsulr {

// Principal-component model: per-column means, eigenvalues of the sample
// covariance in descending order, and the matching orthonormal eigenvectors
// stored as rows of `components`.
struct PcaModel {
    std::vector<double> mean;
    std::vector<double> eigenvalues;      // non-increasing, clamped at 0
    Matrix components;                    // d x d, row i pairs with eigenvalues[i]
    std::vector<double> explainedRatio;   // eigenvalue / trace
    std::size_t nSelected = 0;
};

// Subtracts column means; returns the centered matrix and the means.
std::pair<FeatureMatrix, std::vector<double>> center(const FeatureMatrix& X);

// Sample covariance with the n-1 denominator. Requires n >= 2.
Matrix covariance(const FeatureMatrix& centered);

struct EigenDecomposition {
    std::vector<double> eigenvalues;  // descending
    Matrix eigenvectors;              // rows, orthonormal
};

// Cyclic Jacobi rotations for a symmetric matrix (asymmetry beyond 1e-9 is
// rejected). Deterministic ordering: eigenvalues descending, ties broken by
// the sign-fixed eigenvectors lexicographically; each vector's
// largest-magnitude entry is made positive.
EigenDecomposition eigDecompose(const Matrix& symmetric);

PcaModel pcaFit(const FeatureMatrix& X);

struct SelectionPolicy {
    enum class Kind { Fixed, VarianceThreshold } kind = Kind::VarianceThreshold;
    std::size_t fixedN = 0;
    double threshold = 0.95;
};

// Fixed N clamps to [1, d]; the threshold policy picks the smallest N whose
// cumulative explained ratio reaches the threshold.
std::size_t selectComponentCount(const PcaModel& model, const SelectionPolicy& policy);

// (X - mean) * components[0..N)^T; output columns are named PC1..PCN.
FeatureMatrix pcaTransform(const FeatureMatrix& X, const PcaModel& model, std::size_t n);

// Right-inverse of pcaTransform (exact when n == d).
FeatureMatrix pcaInverseTransform(const FeatureMatrix& projected, const PcaModel& model,
                                  const std::vector<std::string>& featureNames);

}  // namespace ofsulr
