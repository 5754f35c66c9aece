#include "ofsulr/modelselect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ofsulr/error.hpp"
#include "ofsulr/metrics.hpp"
#include "ofsulr/rng.hpp"

namespace ofsulr {

SelectionMetric selectionMetricFromName(const std::string& name) {
    if (name == "accuracy") return SelectionMetric::Accuracy;
    if (name == "f1") return SelectionMetric::F1;
    throw ConfigError("unknown selection metric: " + name);
}

std::string selectionMetricName(SelectionMetric m) {
    return m == SelectionMetric::Accuracy ? "accuracy" : "f1";
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfoldIndices(
    std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("k-fold: k must be at least 2");
    if (n < k) throw DataError("k-fold: fewer rows than folds");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds(k);
    const std::size_t base = n / k;
    const std::size_t larger = n % k;  // the first n%k folds take one extra index
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < larger ? 1 : 0);
        auto& [train, validation] = folds[f];
        validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                          perm.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        train.reserve(n - size);
        train.insert(train.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(cursor));
        train.insert(train.end(), perm.begin() + static_cast<std::ptrdiff_t>(cursor + size), perm.end());
        cursor += size;
    }
    return folds;
}

namespace {

int penaltyRank(Penalty p) {
    switch (p) {
        case Penalty::L2: return 0;
        case Penalty::L1: return 1;
        case Penalty::None: return 2;
    }
    return 2;
}

int solverRank(LogRegSolver s) { return s == LogRegSolver::Gd ? 0 : 1; }

// Tie order: smaller C, then l2 < l1 < none, then gd < newton.
bool tieBefore(const LogRegConfig& a, const LogRegConfig& b) {
    if (a.c != b.c) return a.c < b.c;
    if (penaltyRank(a.penalty) != penaltyRank(b.penalty)) return penaltyRank(a.penalty) < penaltyRank(b.penalty);
    return solverRank(a.solver) < solverRank(b.solver);
}

double metricValue(SelectionMetric metric, const LabelVector& yTrue, const LabelVector& yPred) {
    const Confusion c = confusion(yTrue, yPred);
    return metric == SelectionMetric::Accuracy ? accuracy(c) : f1Score(c);
}

}  // namespace

GridSearchResult gridSearch(const FeatureMatrix& X, const LabelVector& y, const ParamGrid& grid,
                            const GridSearchOptions& options) {
    if (grid.solvers.empty() || grid.penalties.empty() || grid.cValues.empty()) {
        throw ConfigError("grid search: empty parameter grid");
    }

    const auto folds = kfoldIndices(X.rows(), options.folds, options.seed);

    CvResult result;
    // penalty=none ignores C; evaluate once per solver and replicate.
    std::map<int, std::vector<double>> noneScoresBySolver;

    auto evaluateCell = [&](const LogRegConfig& params) {
        std::vector<double> scores;
        scores.reserve(folds.size());
        for (const auto& [trainIdx, valIdx] : folds) {
            FeatureMatrix trainX = X.selectRows(trainIdx);
            FeatureMatrix valX = X.selectRows(valIdx);
            const LabelVector trainY = selectLabels(y, trainIdx);
            const LabelVector valY = selectLabels(y, valIdx);
            if (options.foldPreprocessor != nullptr) {
                auto [preppedTrain, preppedVal] = options.foldPreprocessor->prepare(trainX, valX);
                trainX = std::move(preppedTrain);
                valX = std::move(preppedVal);
            }
            const LogRegModel model = logregFit(trainX, trainY, params);
            scores.push_back(metricValue(options.metric, valY, logregPredict(model, valX)));
        }
        return scores;
    };

    for (double c : grid.cValues) {
        for (Penalty penalty : grid.penalties) {
            for (LogRegSolver solver : grid.solvers) {
                LogRegConfig params;
                params.penalty = penalty;
                params.c = c;
                params.solver = solver;
                params.tol = options.tol;
                params.maxIter = options.maxIter;

                if (penalty == Penalty::L1 && solver == LogRegSolver::Newton) {
                    result.skippedCells.push_back(params);
                    continue;
                }

                CvCell cell;
                cell.params = params;
                if (penalty == Penalty::None) {
                    auto [it, inserted] = noneScoresBySolver.try_emplace(solverRank(solver));
                    if (inserted) it->second = evaluateCell(params);
                    cell.foldScores = it->second;
                } else {
                    cell.foldScores = evaluateCell(params);
                }

                double mean = 0.0;
                for (double s : cell.foldScores) mean += s;
                mean /= static_cast<double>(cell.foldScores.size());
                double var = 0.0;
                for (double s : cell.foldScores) var += (s - mean) * (s - mean);
                cell.mean = mean;
                cell.stddev = std::sqrt(var / static_cast<double>(cell.foldScores.size()));
                result.cells.push_back(std::move(cell));
            }
        }
    }

    if (result.cells.empty()) throw ConfigError("grid search: every grid cell was invalid");

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.cells.size(); ++i) {
        const auto& cand = result.cells[i];
        const auto& cur = result.cells[best];
        if (cand.mean > cur.mean || (cand.mean == cur.mean && tieBefore(cand.params, cur.params))) {
            best = i;
        }
    }
    result.bestCell = best;

    GridSearchResult out;
    out.best = logregFit(X, y, result.cells[best].params);
    out.table = std::move(result);
    return out;
}

std::string cvResultCsv(const CvResult& result) {
    std::ostringstream os;
    os << "solver,penalty,C,mean,stddev";
    std::size_t maxFolds = 0;
    for (const auto& cell : result.cells) maxFolds = std::max(maxFolds, cell.foldScores.size());
    for (std::size_t f = 0; f < maxFolds; ++f) os << ",fold" << f;
    os << ",best\n";
    os.precision(10);
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        os << solverName(cell.params.solver) << ',' << penaltyName(cell.params.penalty) << ','
           << cell.params.c << ',' << cell.mean << ',' << cell.stddev;
        for (double s : cell.foldScores) os << ',' << s;
        os << ',' << (i == result.bestCell ? 1 : 0) << '\n';
    }
    for (const auto& skipped : result.skippedCells) {
        os << solverName(skipped.solver) << ',' << penaltyName(skipped.penalty) << ',' << skipped.c
           << ",skipped,,";
        os << '\n';
    }
    return os.str();
}

}  // namespace ofsulr
