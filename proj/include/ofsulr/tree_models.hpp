#pragma once

#include <cstdint>
#include <vector>

#include "ofsulr/classifier.hpp"
#include "ofsulr/matrix.hpp"
#include "ofsulr/rng.hpp"

namespace ofsulr {

struct TreeConfig {
    std::size_t maxDepth = 12;
    std::size_t minSamplesLeaf = 1;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int klass = 0;         // leaf majority class
    double probaOne = 0.0; // leaf P(class 1)
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    TreeConfig config;
};

// Greedy best split on Gini impurity over midpoints of sorted unique
// values. A node splits only when the weighted child impurity is strictly
// below the parent's. mtry > 0 samples that many candidate features per
// split (used by the forest).
TreeModel treeFit(const FeatureMatrix& X, const LabelVector& y, const TreeConfig& config = {},
                  std::size_t mtry = 0, Rng* rng = nullptr,
                  const std::vector<std::size_t>* rows = nullptr);

std::vector<double> treeScore(const TreeModel& model, const FeatureMatrix& X);
LabelVector treePredict(const TreeModel& model, const FeatureMatrix& X);

struct ForestConfig {
    std::size_t nTrees = 50;
    std::size_t maxDepth = 12;
    std::size_t minSamplesLeaf = 1;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<TreeModel> trees;
    ForestConfig config;
};

// Bootstrap of size n per tree, ceil(sqrt(d)) candidate features per split,
// per-tree seeds derived from the master seed by index.
ForestModel forestFit(const FeatureMatrix& X, const LabelVector& y, const ForestConfig& config = {});

std::vector<double> forestScore(const ForestModel& model, const FeatureMatrix& X);  // vote fraction
LabelVector forestPredict(const ForestModel& model, const FeatureMatrix& X);

struct RegTreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<RegTreeNode> nodes;
};

double regTreeValue(const RegressionTree& tree, std::span<const double> row);

struct GbtConfig {
    std::size_t nStages = 100;
    std::size_t maxDepth = 3;
    double learningRate = 0.1;
    std::size_t minSamplesLeaf = 1;
};

struct GbtModel {
    double initLogOdds = 0.0;
    std::vector<RegressionTree> stages;
    GbtConfig config;
    std::vector<double> stageLoss;  // training log-loss after each stage (not persisted)
};

// Stage-wise regression trees on the log-loss negative gradients (y - p);
// leaf values by one-step Newton. Rejects single-class labels.
GbtModel gbtFit(const FeatureMatrix& X, const LabelVector& y, const GbtConfig& config = {});

std::vector<double> gbtRawScore(const GbtModel& model, const FeatureMatrix& X);
std::vector<double> gbtScore(const GbtModel& model, const FeatureMatrix& X);  // probabilities
LabelVector gbtPredict(const GbtModel& model, const FeatureMatrix& X);

class TreeClassifier : public Classifier {
public:
    TreeClassifier() = default;
    explicit TreeClassifier(const TreeConfig& config) : config_(config) {}

    std::string kind() const override { return "tree"; }
    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    LabelVector predict(const FeatureMatrix& X) const override;
    void write(std::ostream& out) const override;
    void read(std::istream& in) override;

    const TreeModel& model() const { return model_; }

private:
    TreeConfig config_;
    TreeModel model_;
};

class ForestClassifier : public Classifier {
public:
    ForestClassifier() = default;
    explicit ForestClassifier(const ForestConfig& config) : config_(config) {}

    std::string kind() const override { return "forest"; }
    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    LabelVector predict(const FeatureMatrix& X) const override;
    void write(std::ostream& out) const override;
    void read(std::istream& in) override;

    const ForestModel& model() const { return model_; }

private:
    ForestConfig config_;
    ForestModel model_;
};

class GbtClassifier : public Classifier {
public:
    GbtClassifier() = default;
    explicit GbtClassifier(const GbtConfig& config) : config_(config) {}

    std::string kind() const override { return "gbt"; }
    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    LabelVector predict(const FeatureMatrix& X) const override;
    void write(std::ostream& out) const override;
    void read(std::istream& in) override;

    const GbtModel& model() const { return model_; }

private:
    GbtConfig config_;
    GbtModel model_;
};

}  // namespace ofsulr
