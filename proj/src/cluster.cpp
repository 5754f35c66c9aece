#include "ofsulr/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ofsulr/error.hpp"
#include "ofsulr/rng.hpp"

namespace ofsulr {

namespace {

double squaredDistance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

Matrix initialCentroids(const FeatureMatrix& X, std::size_t k, Rng& rng, bool plusPlus) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();
    Matrix centroids(k, d);

    if (!plusPlus) {
        // Sample k distinct rows.
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        rng.shuffle(rows);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t c = 0; c < d; ++c) centroids(j, c) = X.values(rows[j], c);
        }
        return centroids;
    }

    std::vector<double> minSq(n, std::numeric_limits<double>::infinity());
    const std::size_t first = rng.uniformIndex(n);
    for (std::size_t c = 0; c < d; ++c) centroids(0, c) = X.values(first, c);
    for (std::size_t j = 1; j < k; ++j) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            minSq[i] = std::min(minSq[i], squaredDistance(X.values.row(i), centroids.row(j - 1)));
            total += minSq[i];
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.uniformIndex(n);
        } else {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += minSq[i];
                if (cumulative >= target) {
                    pick = i;
                    break;
                }
            }
        }
        for (std::size_t c = 0; c < d; ++c) centroids(j, c) = X.values(pick, c);
    }
    return centroids;
}

struct LloydResult {
    Matrix centroids;
    std::vector<int> assignments;
    std::vector<double> closestSq;
    double wcss = 0.0;
    std::size_t iterations = 0;
};

// One run of Lloyd's from the given centroids. closestSq carries the cached
// squared distance used by the shortcut.
LloydResult lloyd(const FeatureMatrix& X, std::size_t k, Matrix centroids, const KMeansOptions& options) {
    const std::size_t n = X.rows();
    const std::size_t d = X.cols();

    LloydResult state;
    state.assignments.assign(n, 0);
    state.closestSq.assign(n, 0.0);

    auto assignAllDistances = [&](std::size_t i) {
        int best = 0;
        double bestSq = squaredDistance(X.values.row(i), centroids.row(0));
        for (std::size_t j = 1; j < k; ++j) {
            const double sq = squaredDistance(X.values.row(i), centroids.row(j));
            if (sq < bestSq) {
                bestSq = sq;
                best = static_cast<int>(j);
            }
        }
        const bool changed = state.assignments[i] != best;
        state.assignments[i] = best;
        state.closestSq[i] = bestSq;
        return changed;
    };

    // Initial full assignment.
    for (std::size_t i = 0; i < n; ++i) assignAllDistances(i);

    double previousWcss = std::numeric_limits<double>::infinity();
    std::vector<double> sums(k * d);
    std::vector<std::size_t> counts(k);

    for (std::size_t iter = 1; iter <= options.maxIter; ++iter) {
        state.iterations = iter;

        // Recompute centroids as means of their members, in index order.
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(state.assignments[i]);
            ++counts[j];
            for (std::size_t c = 0; c < d; ++c) sums[j * d + c] += X.values(i, c);
        }

        double maxShiftSq = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] == 0) continue;  // repaired below
            double shiftSq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double updated = sums[j * d + c] / static_cast<double>(counts[j]);
                const double delta = updated - centroids(j, c);
                shiftSq += delta * delta;
                centroids(j, c) = updated;
            }
            maxShiftSq = std::max(maxShiftSq, shiftSq);
        }

        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) continue;
            // Reseed an emptied cluster to the point farthest from its centroid.
            std::size_t farthest = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (state.closestSq[i] > state.closestSq[farthest]) farthest = i;
            }
            for (std::size_t c = 0; c < d; ++c) centroids(j, c) = X.values(farthest, c);
            state.assignments[farthest] = static_cast<int>(j);
            state.closestSq[farthest] = 0.0;
            maxShiftSq = std::numeric_limits<double>::infinity();
        }

        bool anyChanged = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (options.cachedDistanceShortcut) {
                const auto cur = static_cast<std::size_t>(state.assignments[i]);
                const double curSq = squaredDistance(X.values.row(i), centroids.row(cur));
                if (curSq <= state.closestSq[i]) {
                    state.closestSq[i] = curSq;  // stays in the same cluster
                    continue;
                }
            }
            anyChanged = assignAllDistances(i) || anyChanged;
        }

        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) wcss += state.closestSq[i];
        if (wcss > previousWcss * (1.0 + 1e-9) + 1e-12) {
            throw NumericError("k-means objective increased across an iteration");
        }
        previousWcss = wcss;
        state.wcss = wcss;

        if (!anyChanged || std::sqrt(maxShiftSq) < options.tol) break;
    }

    // Make the stored centroids consistent with the final assignment.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(state.assignments[i]);
        ++counts[j];
        for (std::size_t c = 0; c < d; ++c) sums[j * d + c] += X.values(i, c);
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) continue;
        for (std::size_t c = 0; c < d; ++c) centroids(j, c) = sums[j * d + c] / static_cast<double>(counts[j]);
    }
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(state.assignments[i]);
        state.closestSq[i] = squaredDistance(X.values.row(i), centroids.row(j));
        wcss += state.closestSq[i];
    }
    state.wcss = wcss;
    state.centroids = std::move(centroids);
    return state;
}

}  // namespace

ClusterModel kmeansFit(const FeatureMatrix& X, std::size_t k, const KMeansOptions& options) {
    const std::size_t n = X.rows();
    if (k < 1) throw ConfigError("k must be at least 1");
    if (n < k) throw DataError("k-means: fewer rows than clusters");
    if (!X.values.allFinite()) throw NumericError("k-means: non-finite input");

    Rng master(options.seed);
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);

    LloydResult best;
    bool haveBest = false;
    for (std::size_t attempt = 0; attempt < restarts; ++attempt) {
        Rng rng = master.derive(attempt);
        LloydResult run = lloyd(X, k, initialCentroids(X, k, rng, options.kmeansPlusPlus), options);
        if (!haveBest || run.wcss < best.wcss) {
            best = std::move(run);
            haveBest = true;
        }
    }

    ClusterModel model;
    model.k = k;
    model.seed = options.seed;
    model.centroids = std::move(best.centroids);
    model.assignments = std::move(best.assignments);
    model.iterations = best.iterations;
    model.wcss = best.wcss;
    model.closestDist.resize(n);
    for (std::size_t i = 0; i < n; ++i) model.closestDist[i] = std::sqrt(best.closestSq[i]);
    return model;
}

std::vector<int> kmeansAssign(const ClusterModel& model, const FeatureMatrix& X) {
    if (X.cols() != model.centroids.cols()) throw DataError("k-means assign: dimension mismatch");
    std::vector<int> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        int best = 0;
        double bestSq = squaredDistance(X.values.row(i), model.centroids.row(0));
        for (std::size_t j = 1; j < model.k; ++j) {
            const double sq = squaredDistance(X.values.row(i), model.centroids.row(j));
            if (sq < bestSq) {
                bestSq = sq;
                best = static_cast<int>(j);
            }
        }
        out[i] = best;
    }
    return out;
}

std::vector<int> clusterClassMap(const ClusterModel& model) {
    std::vector<std::size_t> counts(model.k, 0);
    for (int a : model.assignments) ++counts[static_cast<std::size_t>(a)];

    std::vector<std::size_t> order(model.k);
    for (std::size_t j = 0; j < model.k; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        const auto ra = model.centroids.row(a);
        const auto rb = model.centroids.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });

    std::vector<int> classOf(model.k);
    for (std::size_t rank = 0; rank < model.k; ++rank) classOf[order[rank]] = static_cast<int>(rank);
    return classOf;
}

LabelVector labelsOf(const ClusterModel& model) {
    const std::vector<int> classOf = clusterClassMap(model);
    LabelVector labels(model.assignments.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        labels[i] = classOf[static_cast<std::size_t>(model.assignments[i])];
    }
    return labels;
}

std::size_t kneeIndex(const std::vector<std::size_t>& ks, const std::vector<double>& wcss,
                      std::size_t firstCandidate) {
    if (ks.size() != wcss.size() || ks.empty()) throw DataError("knee: malformed curve");
    if (ks.size() == 1) return 0;

    const double x0 = static_cast<double>(ks.front());
    const double y0 = wcss.front();
    const double x1 = static_cast<double>(ks.back());
    const double y1 = wcss.back();
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double chordLength = std::sqrt(dx * dx + dy * dy);
    const double midK = (x0 + x1) / 2.0;

    std::size_t bestIdx = firstCandidate;
    double bestDist = -1.0;
    for (std::size_t i = firstCandidate; i < ks.size(); ++i) {
        const double kx = static_cast<double>(ks[i]);
        const double dist = chordLength > 0.0
                                ? std::abs(dy * (kx - x0) - dx * (wcss[i] - y0)) / chordLength
                                : 0.0;
        const double tieScale = std::max(1.0, std::abs(y0) + std::abs(y1));
        if (dist > bestDist + 1e-12 * tieScale) {
            bestDist = dist;
            bestIdx = i;
        } else if (std::abs(dist - bestDist) <= 1e-12 * tieScale) {
            const double curMid = std::abs(static_cast<double>(ks[bestIdx]) - midK);
            const double newMid = std::abs(kx - midK);
            if (newMid < curMid - 1e-12) bestIdx = i;  // else keep the smaller k
        }
    }
    return bestIdx;
}

ElbowCurve elbowSelect(const FeatureMatrix& X, std::size_t kMin, std::size_t kMax,
                       const KMeansOptions& options) {
    if (kMin < 1 || kMin >= kMax) throw ConfigError("elbow: need 1 <= kMin < kMax");
    if (kMax > X.rows()) throw DataError("elbow: kMax exceeds the row count");

    std::vector<std::size_t> curveKs;
    std::vector<double> curveWcss;
    if (kMin > 1) {
        curveKs.push_back(1);
        curveWcss.push_back(kmeansFit(X, 1, options).wcss);
    }
    const std::size_t firstCandidate = curveKs.size();

    ElbowCurve out;
    for (std::size_t k = kMin; k <= kMax; ++k) {
        const ClusterModel model = kmeansFit(X, k, options);
        out.ks.push_back(k);
        out.wcss.push_back(model.wcss);
        curveKs.push_back(k);
        curveWcss.push_back(model.wcss);
    }
    out.chosenK = curveKs[kneeIndex(curveKs, curveWcss, firstCandidate)];
    return out;
}

}  // namespace ofsulr
