#pragma once

#include <cstdint>
#include <vector>

#include "ofsulr/matrix.hpp"

namespace ofsulr {

struct ClusterModel {
    std::size_t k = 0;
    Matrix centroids;                 // k x d
    std::vector<int> assignments;     // per row, in [0, k)
    std::vector<double> closestDist;  // Euclidean distance to the assigned centroid
    double wcss = 0.0;                // sum of squared distances == sum closestDist^2
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

struct KMeansOptions {
    std::uint64_t seed = 0;
    std::size_t maxIter = 300;
    double tol = 1e-6;       // max centroid shift
    std::size_t restarts = 5;
    bool kmeansPlusPlus = true;       // else a plain random row sample
    bool cachedDistanceShortcut = true;
};

// Lloyd iterations over squared Euclidean distance. With the shortcut
// enabled, a point's distance to its current centroid is recomputed first
// after every centroid update; the full k-way scan runs only when that
// distance exceeded the cached closest distance. Ties go to the lowest
// centroid index; an emptied cluster is reseeded to the farthest point.
ClusterModel kmeansFit(const FeatureMatrix& X, std::size_t k, const KMeansOptions& options = {});

// Nearest-centroid cluster ids for held-out rows.
std::vector<int> kmeansAssign(const ClusterModel& model, const FeatureMatrix& X);

// Deterministic class naming: class 0 is the larger cluster; equal sizes
// break toward the lexicographically smaller centroid.
std::vector<int> clusterClassMap(const ClusterModel& model);
LabelVector labelsOf(const ClusterModel& model);

struct ElbowCurve {
    std::vector<std::size_t> ks;
    std::vector<double> wcss;
    std::size_t chosenK = 0;
};

// Knee of a wcss-vs-k curve: the point with maximal perpendicular distance
// to the chord joining the first and last curve points. Ties prefer the k
// nearest the middle of the range, then the smallest k. Points before
// firstCandidate anchor the chord but cannot be chosen.
std::size_t kneeIndex(const std::vector<std::size_t>& ks, const std::vector<double>& wcss,
                      std::size_t firstCandidate = 0);

// Runs kmeansFit for each k in [kMin, kMax]. When kMin > 1 the curve is
// anchored at k=1 (total scatter) so a knee at the smallest requested k is
// detectable; the anchor itself is never chosen.
ElbowCurve elbowSelect(const FeatureMatrix& X, std::size_t kMin, std::size_t kMax,
                       const KMeansOptions& options = {});

}  // namespace ofsulr
