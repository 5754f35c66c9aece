#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ofsulr {

// Dense row-major matrix of doubles. Feature counts here are small (tens),
// row counts up to a few hundred thousand.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    Matrix selectRows(const std::vector<std::size_t>& idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(idx[i], c);
        }
        return out;
    }

    bool allFinite() const;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Numeric design matrix plus the feature names that produced it.
// Invariant: values has no non-finite entries; featureNames.size() == cols.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> featureNames;

    std::size_t rows() const { return values.rows(); }
    std::size_t cols() const { return values.cols(); }

    FeatureMatrix selectRows(const std::vector<std::size_t>& idx) const {
        return {values.selectRows(idx), featureNames};
    }
};

// Class ids, contiguous from 0.
using LabelVector = std::vector<int>;

inline LabelVector selectLabels(const LabelVector& y, const std::vector<std::size_t>& idx) {
    LabelVector out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
    return out;
}

}  // namespace ofsulr
