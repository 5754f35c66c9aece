#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ofsulr/linear_models.hpp"
#include "ofsulr/matrix.hpp"

namespace ofsulr {

struct ParamGrid {
    std::vector<LogRegSolver> solvers = {LogRegSolver::Gd, LogRegSolver::Newton};
    std::vector<Penalty> penalties = {Penalty::L1, Penalty::L2, Penalty::None};
    std::vector<double> cValues = {0.01, 0.1, 1.0, 10.0, 100.0};
};

enum class SelectionMetric { Accuracy, F1 };
SelectionMetric selectionMetricFromName(const std::string& name);
std::string selectionMetricName(SelectionMetric m);

struct CvCell {
    LogRegConfig params;
    std::vector<double> foldScores;
    double mean = 0.0;
    double stddev = 0.0;
};

struct CvResult {
    std::vector<CvCell> cells;               // valid cells, grid order
    std::vector<LogRegConfig> skippedCells;  // invalid combinations (l1+newton)
    std::size_t bestCell = 0;
};

// Shuffled k-fold assignment: fold sizes differ by at most one and every
// index lands in exactly one validation fold.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfoldIndices(
    std::size_t n, std::size_t k, std::uint64_t seed);

// Optional per-fold preprocessing, fit on the fold's training rows only and
// applied to both parts. Keeps validation rows out of fitted statistics.
struct FoldPreprocessor {
    virtual ~FoldPreprocessor() = default;
    virtual std::pair<FeatureMatrix, FeatureMatrix> prepare(const FeatureMatrix& trainX,
                                                            const FeatureMatrix& valX) = 0;
};

struct GridSearchOptions {
    std::size_t folds = 3;
    std::uint64_t seed = 0;
    SelectionMetric metric = SelectionMetric::Accuracy;
    double tol = 1e-6;
    std::size_t maxIter = 1000;
    FoldPreprocessor* foldPreprocessor = nullptr;
};

struct GridSearchResult {
    CvResult table;
    LogRegModel best;  // refit on all of X, y with the argmax cell's parameters
};

// Exhaustive evaluation of the grid by mean validation metric over k folds.
// penalty=none cells are mathematically identical across C, so they are
// evaluated once per solver and the result replicated. Ties prefer smaller
// C, then l2 < l1 < none, then gd < newton.
GridSearchResult gridSearch(const FeatureMatrix& X, const LabelVector& y, const ParamGrid& grid,
                            const GridSearchOptions& options = {});

std::string cvResultCsv(const CvResult& result);

}  // namespace ofsulr
