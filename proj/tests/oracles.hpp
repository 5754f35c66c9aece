#pragma once

// Independent brute-force oracles used by the tests. Everything here is
// deliberately naive and kept apart from the library implementations it
// cross-checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "ofsulr/matrix.hpp"

namespace oracle {

struct Counts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

inline Counts countConfusion(const std::vector<int>& yTrue, const std::vector<int>& yPred) {
    Counts c;
    for (std::size_t i = 0; i < yTrue.size(); ++i) {
        if (yTrue[i] == 1 && yPred[i] == 1) ++c.tp;
        if (yTrue[i] == 0 && yPred[i] == 0) ++c.tn;
        if (yTrue[i] == 0 && yPred[i] == 1) ++c.fp;
        if (yTrue[i] == 1 && yPred[i] == 0) ++c.fn;
    }
    return c;
}

// AUC as the Mann-Whitney pair statistic: P(score_pos > score_neg), ties 1/2.
inline double pairStatisticAuc(const std::vector<double>& scores, const std::vector<int>& y) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

inline double partitionWcss(const ofsulr::Matrix& X, const std::vector<int>& assignment, int k) {
    const std::size_t d = X.cols();
    std::vector<double> sums(static_cast<std::size_t>(k) * d, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        ++counts[c];
        for (std::size_t f = 0; f < d; ++f) sums[c * d + f] += X(i, f);
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto c = static_cast<std::size_t>(assignment[i]);
        for (std::size_t f = 0; f < d; ++f) {
            const double delta = X(i, f) - sums[c * d + f] / static_cast<double>(counts[c]);
            wcss += delta * delta;
        }
    }
    return wcss;
}

// Minimum WCSS over every 2-partition (point 0 pinned to cluster 0; both
// clusters non-empty). Exponential: n <= ~20.
inline double exhaustiveTwoPartitionWcss(const ofsulr::Matrix& X) {
    const std::size_t n = X.rows();
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> assignment(n, 0);
    for (std::uint64_t mask = 1; mask < (1ULL << (n - 1)); ++mask) {
        for (std::size_t i = 1; i < n; ++i) assignment[i] = (mask >> (i - 1)) & 1 ? 1 : 0;
        best = std::min(best, partitionWcss(X, assignment, 2));
    }
    return best;
}

// Central finite differences of a scalar function over (weights, bias).
inline void centralDifferenceGradient(
    const std::function<double(std::span<const double>, double)>& objective,
    std::vector<double> weights, double bias, double h,
    std::vector<double>& gradWeights, double& gradBias) {
    gradWeights.assign(weights.size(), 0.0);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double keep = weights[j];
        weights[j] = keep + h;
        const double up = objective(weights, bias);
        weights[j] = keep - h;
        const double down = objective(weights, bias);
        weights[j] = keep;
        gradWeights[j] = (up - down) / (2.0 * h);
    }
    gradBias = (objective(weights, bias + h) - objective(weights, bias - h)) / (2.0 * h);
}

// Days since 1970-01-01 by iterating years and months.
inline std::int64_t iterativeDaysSinceEpoch(int year, int month, int day) {
    auto leap = [](int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; };
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    std::int64_t days = 0;
    if (year >= 1970) {
        for (int y = 1970; y < year; ++y) days += leap(y) ? 366 : 365;
    } else {
        for (int y = year; y < 1970; ++y) days -= leap(y) ? 366 : 365;
    }
    for (int m = 1; m < month; ++m) days += (m == 2 && leap(year)) ? 29 : lengths[m - 1];
    return days + day - 1;
}

}  // namespace oracle
