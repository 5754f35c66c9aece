#include "ofsulr/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ofsulr/error.hpp"

namespace ofsulr {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;  // relative to the Frobenius norm
constexpr double kSymmetryTolerance = 1e-9;

double offDiagonalNorm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}

double frobeniusNorm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j) * a(i, j);
    }
    return std::sqrt(sum);
}

void fixSign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0.0) {
        for (double& x : v) x = -x;
    }
}

}  // namespace

std::pair<FeatureMatrix, std::vector<double>> center(const FeatureMatrix& X) {
    if (X.rows() == 0) throw DataError("cannot center an empty matrix");
    const std::size_t d = X.cols();
    std::vector<double> mean(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < X.rows(); ++r) sum += X.values(r, c);
        mean[c] = sum / static_cast<double>(X.rows());
    }
    FeatureMatrix out = X;
    for (std::size_t r = 0; r < X.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) out.values(r, c) = X.values(r, c) - mean[c];
    }
    return {std::move(out), std::move(mean)};
}

Matrix covariance(const FeatureMatrix& centered) {
    const std::size_t n = centered.rows();
    if (n < 2) throw DataError("covariance needs at least 2 rows");
    const std::size_t d = centered.cols();
    Matrix s(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += centered.values(r, i) * centered.values(r, j);
            const double v = sum / static_cast<double>(n - 1);
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

EigenDecomposition eigDecompose(const Matrix& symmetric) {
    const std::size_t d = symmetric.rows();
    if (d == 0 || symmetric.cols() != d) throw DataError("eigendecomposition needs a square matrix");
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (std::abs(symmetric(i, j) - symmetric(j, i)) > kSymmetryTolerance) {
                throw DataError("matrix is not symmetric within 1e-9");
            }
        }
    }

    Matrix a = symmetric;
    Matrix v(d, d);
    for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

    const double scale = std::max(frobeniusNorm(a), 1e-300);
    int sweep = 0;
    while (offDiagonalNorm(a) > kOffDiagonalTolerance * scale) {
        if (++sweep > kMaxJacobiSweeps) {
            throw NumericError("Jacobi eigensolver did not converge in " + std::to_string(kMaxJacobiSweeps) + " sweeps");
        }
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                // Smaller-magnitude root for a stable rotation.
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < d; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::vector<double>> vectors(d, std::vector<double>(d));
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) {
        values[i] = a(i, i);
        for (std::size_t k = 0; k < d; ++k) vectors[i][k] = v(k, i);
        fixSign(vectors[i]);
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (values[x] != values[y]) return values[x] > values[y];
        return vectors[x] < vectors[y];  // deterministic tie order
    });

    EigenDecomposition out;
    out.eigenvalues.resize(d);
    out.eigenvectors = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        out.eigenvalues[i] = values[order[i]];
        for (std::size_t k = 0; k < d; ++k) out.eigenvectors(i, k) = vectors[order[i]][k];
    }
    return out;
}

PcaModel pcaFit(const FeatureMatrix& X) {
    auto [centered, mean] = center(X);
    const Matrix s = covariance(centered);
    EigenDecomposition eig = eigDecompose(s);

    PcaModel model;
    model.mean = std::move(mean);
    model.components = std::move(eig.eigenvectors);
    model.eigenvalues = std::move(eig.eigenvalues);
    for (double& lambda : model.eigenvalues) {
        if (lambda < 0.0) lambda = 0.0;  // roundoff on a PSD matrix
    }
    double total = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    model.explainedRatio.resize(model.eigenvalues.size());
    for (std::size_t i = 0; i < model.eigenvalues.size(); ++i) {
        model.explainedRatio[i] = total > 0.0 ? model.eigenvalues[i] / total
                                              : 1.0 / static_cast<double>(model.eigenvalues.size());
    }
    model.nSelected = model.eigenvalues.size();
    return model;
}

std::size_t selectComponentCount(const PcaModel& model, const SelectionPolicy& policy) {
    const std::size_t d = model.eigenvalues.size();
    if (policy.kind == SelectionPolicy::Kind::Fixed) {
        if (policy.fixedN < 1) throw ConfigError("component count must be at least 1");
        return std::min(policy.fixedN, d);
    }
    double cumulative = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        cumulative += model.explainedRatio[i];
        if (cumulative >= policy.threshold - 1e-12) return i + 1;
    }
    return d;
}

FeatureMatrix pcaTransform(const FeatureMatrix& X, const PcaModel& model, std::size_t n) {
    const std::size_t d = model.mean.size();
    if (X.cols() != d) throw DataError("pca transform: expected " + std::to_string(d) + " features, got " +
                                       std::to_string(X.cols()));
    if (n < 1 || n > d) throw ConfigError("pca transform: invalid component count");

    FeatureMatrix out;
    out.values = Matrix(X.rows(), n);
    for (std::size_t i = 0; i < n; ++i) out.featureNames.push_back("PC" + std::to_string(i + 1));
    for (std::size_t r = 0; r < X.rows(); ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                sum += (X.values(r, c) - model.mean[c]) * model.components(i, c);
            }
            out.values(r, i) = sum;
        }
    }
    return out;
}

FeatureMatrix pcaInverseTransform(const FeatureMatrix& projected, const PcaModel& model,
                                  const std::vector<std::string>& featureNames) {
    const std::size_t d = model.mean.size();
    const std::size_t n = projected.cols();
    if (n > d) throw DataError("pca inverse transform: too many components");

    FeatureMatrix out;
    out.values = Matrix(projected.rows(), d);
    out.featureNames = featureNames;
    for (std::size_t r = 0; r < projected.rows(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            double sum = model.mean[c];
            for (std::size_t i = 0; i < n; ++i) {
                sum += projected.values(r, i) * model.components(i, c);
            }
            out.values(r, c) = sum;
        }
    }
    return out;
}

}  // namespace ofsulr
