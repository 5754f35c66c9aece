#include "ofsulr/tree_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "ofsulr/error.hpp"
#include "ofsulr/serialize.hpp"

namespace ofsulr {

namespace {

constexpr double kMinImpurityDecrease = 1e-12;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double giniOf(std::size_t ones, std::size_t total) {
    if (total == 0) return 0.0;
    const double p1 = static_cast<double>(ones) / static_cast<double>(total);
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // weighted child impurity / SSE
};

std::vector<std::size_t> candidateFeatures(std::size_t d, std::size_t mtry, Rng* rng) {
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (mtry == 0 || mtry >= d || rng == nullptr) return features;
    // Partial Fisher-Yates: the first mtry entries are the sample.
    for (std::size_t i = 0; i < mtry; ++i) {
        std::swap(features[i], features[i + rng->uniformIndex(d - i)]);
    }
    features.resize(mtry);
    std::sort(features.begin(), features.end());  // index order keeps splits deterministic
    return features;
}

struct TreeBuilder {
    const FeatureMatrix& X;
    const LabelVector& y;
    const TreeConfig& config;
    std::size_t mtry;
    Rng* rng;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t n = rows.size();
        std::size_t ones = 0;
        for (std::size_t r : rows) ones += static_cast<std::size_t>(y[r]);

        TreeNode leaf;
        leaf.probaOne = n == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(n);
        leaf.klass = leaf.probaOne >= 0.5 ? 1 : 0;

        const double parentGini = giniOf(ones, n);
        if (parentGini == 0.0 || depth >= config.maxDepth || n < 2 * config.minSamplesLeaf) {
            nodes.push_back(leaf);
            return static_cast<int>(nodes.size() - 1);
        }

        const SplitChoice split = bestSplit(rows, ones, parentGini);
        if (split.feature < 0) {
            nodes.push_back(leaf);
            return static_cast<int>(nodes.size() - 1);
        }

        std::vector<std::size_t> leftRows;
        std::vector<std::size_t> rightRows;
        leftRows.reserve(n);
        rightRows.reserve(n);
        for (std::size_t r : rows) {
            (X.values(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? leftRows : rightRows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        TreeNode node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        nodes.push_back(node);
        const auto self = static_cast<int>(nodes.size() - 1);
        nodes[static_cast<std::size_t>(self)].left = build(leftRows, depth + 1);
        nodes[static_cast<std::size_t>(self)].right = build(rightRows, depth + 1);
        return self;
    }

    SplitChoice bestSplit(const std::vector<std::size_t>& rows, std::size_t ones, double parentGini) {
        const std::size_t n = rows.size();
        SplitChoice best;
        std::vector<std::pair<double, int>> sorted(n);

        for (std::size_t f : candidateFeatures(X.cols(), mtry, rng)) {
            for (std::size_t i = 0; i < n; ++i) {
                sorted[i] = {X.values(rows[i], f), y[rows[i]]};
            }
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            std::size_t leftOnes = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                leftOnes += static_cast<std::size_t>(sorted[i].second);
                if (sorted[i].first == sorted[i + 1].first) continue;  // boundary only between distinct values
                const std::size_t leftN = i + 1;
                const std::size_t rightN = n - leftN;
                if (leftN < config.minSamplesLeaf || rightN < config.minSamplesLeaf) continue;
                const double weighted =
                    (static_cast<double>(leftN) * giniOf(leftOnes, leftN) +
                     static_cast<double>(rightN) * giniOf(ones - leftOnes, rightN)) /
                    static_cast<double>(n);
                if (weighted < best.score && weighted < parentGini - kMinImpurityDecrease) {
                    best.score = weighted;
                    best.feature = static_cast<int>(f);
                    best.threshold = sorted[i].first / 2.0 + sorted[i + 1].first / 2.0;
                }
            }
        }
        return best;
    }
};

const TreeNode& descend(const TreeModel& model, std::span<const double> row) {
    const TreeNode* node = &model.nodes.front();
    while (node->feature >= 0) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &model.nodes[static_cast<std::size_t>(node->left)]
                   : &model.nodes[static_cast<std::size_t>(node->right)];
    }
    return *node;
}

}  // namespace

TreeModel treeFit(const FeatureMatrix& X, const LabelVector& y, const TreeConfig& config,
                  std::size_t mtry, Rng* rng, const std::vector<std::size_t>* rows) {
    if (X.rows() != y.size()) throw DataError("tree: X and y row counts differ");
    if (X.rows() == 0) throw DataError("tree: empty training data");
    for (int v : y) {
        if (v != 0 && v != 1) throw DataError("tree: labels must be binary");
    }

    std::vector<std::size_t> rootRows;
    if (rows != nullptr) {
        rootRows = *rows;
    } else {
        rootRows.resize(X.rows());
        std::iota(rootRows.begin(), rootRows.end(), std::size_t{0});
    }

    TreeBuilder builder{X, y, config, mtry, rng, {}};
    builder.build(rootRows, 0);

    TreeModel model;
    model.config = config;
    model.nodes = std::move(builder.nodes);
    return model;
}

std::vector<double> treeScore(const TreeModel& model, const FeatureMatrix& X) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = descend(model, X.values.row(i)).probaOne;
    return out;
}

LabelVector treePredict(const TreeModel& model, const FeatureMatrix& X) {
    LabelVector out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = descend(model, X.values.row(i)).klass;
    return out;
}

ForestModel forestFit(const FeatureMatrix& X, const LabelVector& y, const ForestConfig& config) {
    if (config.nTrees == 0) throw ConfigError("forest: need at least one tree");
    const std::size_t n = X.rows();
    const auto mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols()))));

    ForestModel model;
    model.config = config;
    model.trees.reserve(config.nTrees);

    Rng master(config.seed);
    TreeConfig treeConfig{config.maxDepth, config.minSamplesLeaf};
    for (std::size_t t = 0; t < config.nTrees; ++t) {
        Rng rng = master.derive(t);
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.uniformIndex(n);
        model.trees.push_back(treeFit(X, y, treeConfig, mtry, &rng, &bootstrap));
    }
    return model;
}

std::vector<double> forestScore(const ForestModel& model, const FeatureMatrix& X) {
    std::vector<double> votes(X.rows(), 0.0);
    for (const auto& tree : model.trees) {
        const LabelVector pred = treePredict(tree, X);
        for (std::size_t i = 0; i < pred.size(); ++i) votes[i] += static_cast<double>(pred[i]);
    }
    for (double& v : votes) v /= static_cast<double>(model.trees.size());
    return votes;
}

LabelVector forestPredict(const ForestModel& model, const FeatureMatrix& X) {
    const std::vector<double> votes = forestScore(model, X);
    LabelVector out(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i) out[i] = votes[i] >= 0.5 ? 1 : 0;
    return out;
}

namespace {

struct RegTreeBuilder {
    const FeatureMatrix& X;
    const std::vector<double>& residual;
    const std::vector<double>& hessian;
    std::size_t maxDepth;
    std::size_t minSamplesLeaf;
    std::vector<RegTreeNode> nodes;

    double newtonLeafValue(const std::vector<std::size_t>& rows) const {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t r : rows) {
            num += residual[r];
            den += hessian[r];
        }
        return num / std::max(den, 1e-12);
    }

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        RegTreeNode leaf;
        leaf.value = newtonLeafValue(rows);

        if (depth >= maxDepth || rows.size() < 2 * minSamplesLeaf) {
            nodes.push_back(leaf);
            return static_cast<int>(nodes.size() - 1);
        }

        const SplitChoice split = bestSplit(rows);
        if (split.feature < 0) {
            nodes.push_back(leaf);
            return static_cast<int>(nodes.size() - 1);
        }

        std::vector<std::size_t> leftRows;
        std::vector<std::size_t> rightRows;
        for (std::size_t r : rows) {
            (X.values(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? leftRows : rightRows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        RegTreeNode node;
        node.feature = split.feature;
        node.threshold = split.threshold;
        nodes.push_back(node);
        const auto self = static_cast<int>(nodes.size() - 1);
        nodes[static_cast<std::size_t>(self)].left = build(leftRows, depth + 1);
        nodes[static_cast<std::size_t>(self)].right = build(rightRows, depth + 1);
        return self;
    }

    SplitChoice bestSplit(const std::vector<std::size_t>& rows) const {
        const std::size_t n = rows.size();
        double total = 0.0;
        double totalSq = 0.0;
        for (std::size_t r : rows) {
            total += residual[r];
            totalSq += residual[r] * residual[r];
        }
        const double parentSse = totalSq - total * total / static_cast<double>(n);

        SplitChoice best;
        best.score = parentSse - kMinImpurityDecrease;
        std::vector<std::pair<double, double>> sorted(n);  // (feature value, residual)
        for (std::size_t f = 0; f < X.cols(); ++f) {
            for (std::size_t i = 0; i < n; ++i) sorted[i] = {X.values(rows[i], f), residual[rows[i]]};
            std::sort(sorted.begin(), sorted.end());
            if (sorted.front().first == sorted.back().first) continue;

            double leftSum = 0.0;
            double leftSq = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                leftSum += sorted[i].second;
                leftSq += sorted[i].second * sorted[i].second;
                if (sorted[i].first == sorted[i + 1].first) continue;
                const std::size_t leftN = i + 1;
                const std::size_t rightN = n - leftN;
                if (leftN < minSamplesLeaf || rightN < minSamplesLeaf) continue;
                const double rightSum = total - leftSum;
                const double rightSq = totalSq - leftSq;
                const double sse = (leftSq - leftSum * leftSum / static_cast<double>(leftN)) +
                                   (rightSq - rightSum * rightSum / static_cast<double>(rightN));
                if (sse < best.score) {
                    best.score = sse;
                    best.feature = static_cast<int>(f);
                    best.threshold = sorted[i].first / 2.0 + sorted[i + 1].first / 2.0;
                }
            }
        }
        return best;
    }
};

const RegTreeNode& regDescend(const RegressionTree& tree, std::span<const double> row) {
    const RegTreeNode* node = &tree.nodes.front();
    while (node->feature >= 0) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &tree.nodes[static_cast<std::size_t>(node->left)]
                   : &tree.nodes[static_cast<std::size_t>(node->right)];
    }
    return *node;
}

}  // namespace

double regTreeValue(const RegressionTree& tree, std::span<const double> row) {
    return regDescend(tree, row).value;
}

GbtModel gbtFit(const FeatureMatrix& X, const LabelVector& y, const GbtConfig& config) {
    if (X.rows() != y.size()) throw DataError("gbt: X and y row counts differ");
    if (X.rows() == 0) throw DataError("gbt: empty training data");
    std::size_t ones = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw DataError("gbt: labels must be binary");
        ones += static_cast<std::size_t>(v);
    }
    if (ones == 0 || ones == y.size()) {
        throw DataError("gbt: single-class labels give an infinite initial log-odds");
    }

    const std::size_t n = X.rows();
    GbtModel model;
    model.config = config;
    model.initLogOdds = std::log(static_cast<double>(ones) / static_cast<double>(n - ones));

    std::vector<double> raw(n, model.initLogOdds);
    std::vector<double> residual(n);
    std::vector<double> hessian(n);

    for (std::size_t stage = 0; stage < config.nStages; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            residual[i] = static_cast<double>(y[i]) - p;
            hessian[i] = std::max(p * (1.0 - p), 1e-12);
        }

        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        RegTreeBuilder builder{X, residual, hessian, config.maxDepth, config.minSamplesLeaf, {}};
        builder.build(rows, 0);

        RegressionTree tree;
        tree.nodes = std::move(builder.nodes);

        for (std::size_t i = 0; i < n; ++i) {
            raw[i] += config.learningRate * regTreeValue(tree, X.values.row(i));
        }
        model.stages.push_back(std::move(tree));

        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = raw[i];
            const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
            loss += softplus - static_cast<double>(y[i]) * z;
        }
        model.stageLoss.push_back(loss / static_cast<double>(n));
    }
    return model;
}

std::vector<double> gbtRawScore(const GbtModel& model, const FeatureMatrix& X) {
    std::vector<double> out(X.rows(), model.initLogOdds);
    for (const auto& tree : model.stages) {
        for (std::size_t i = 0; i < X.rows(); ++i) {
            out[i] += model.config.learningRate * regTreeValue(tree, X.values.row(i));
        }
    }
    return out;
}

std::vector<double> gbtScore(const GbtModel& model, const FeatureMatrix& X) {
    std::vector<double> out = gbtRawScore(model, X);
    for (double& v : out) v = sigmoid(v);
    return out;
}

LabelVector gbtPredict(const GbtModel& model, const FeatureMatrix& X) {
    const std::vector<double> raw = gbtRawScore(model, X);
    LabelVector out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] >= 0.0 ? 1 : 0;
    return out;
}

namespace {

void writeTreeNodes(std::ostream& out, const std::vector<TreeNode>& nodes) {
    out << "nodes " << nodes.size() << '\n';
    for (const auto& n : nodes) {
        out << "node " << n.feature << ' ' << ser::fmtDouble(n.threshold) << ' ' << n.left << ' '
            << n.right << ' ' << n.klass << ' ' << ser::fmtDouble(n.probaOne) << '\n';
    }
}

std::vector<TreeNode> readTreeNodes(std::istream& in) {
    const std::size_t count = static_cast<std::size_t>(std::stoull(ser::expectLine(in, "nodes").at(0)));
    std::vector<TreeNode> nodes(count);
    for (auto& n : nodes) {
        const auto tokens = ser::expectLine(in, "node");
        n.feature = std::stoi(tokens.at(0));
        n.threshold = ser::parseDouble(tokens.at(1));
        n.left = std::stoi(tokens.at(2));
        n.right = std::stoi(tokens.at(3));
        n.klass = std::stoi(tokens.at(4));
        n.probaOne = ser::parseDouble(tokens.at(5));
    }
    return nodes;
}

void writeRegTree(std::ostream& out, const RegressionTree& tree) {
    out << "nodes " << tree.nodes.size() << '\n';
    for (const auto& n : tree.nodes) {
        out << "node " << n.feature << ' ' << ser::fmtDouble(n.threshold) << ' ' << n.left << ' '
            << n.right << ' ' << ser::fmtDouble(n.value) << '\n';
    }
}

RegressionTree readRegTree(std::istream& in) {
    RegressionTree tree;
    const std::size_t count = static_cast<std::size_t>(std::stoull(ser::expectLine(in, "nodes").at(0)));
    tree.nodes.resize(count);
    for (auto& n : tree.nodes) {
        const auto tokens = ser::expectLine(in, "node");
        n.feature = std::stoi(tokens.at(0));
        n.threshold = ser::parseDouble(tokens.at(1));
        n.left = std::stoi(tokens.at(2));
        n.right = std::stoi(tokens.at(3));
        n.value = ser::parseDouble(tokens.at(4));
    }
    return tree;
}

}  // namespace

void TreeClassifier::fit(const FeatureMatrix& X, const LabelVector& y) {
    Stopwatch watch;
    model_ = treeFit(X, y, config_);
    info_.trainSeconds = watch.seconds();
    info_.iterations = model_.nodes.size();
}

std::vector<double> TreeClassifier::score(const FeatureMatrix& X) const { return treeScore(model_, X); }
LabelVector TreeClassifier::predict(const FeatureMatrix& X) const { return treePredict(model_, X); }

void TreeClassifier::write(std::ostream& out) const {
    out << "depth " << model_.config.maxDepth << '\n';
    out << "minleaf " << model_.config.minSamplesLeaf << '\n';
    writeTreeNodes(out, model_.nodes);
}

void TreeClassifier::read(std::istream& in) {
    model_ = TreeModel{};
    model_.config.maxDepth = std::stoull(ser::expectLine(in, "depth").at(0));
    model_.config.minSamplesLeaf = std::stoull(ser::expectLine(in, "minleaf").at(0));
    model_.nodes = readTreeNodes(in);
    config_ = model_.config;
}

void ForestClassifier::fit(const FeatureMatrix& X, const LabelVector& y) {
    Stopwatch watch;
    model_ = forestFit(X, y, config_);
    info_.trainSeconds = watch.seconds();
    info_.iterations = model_.trees.size();
}

std::vector<double> ForestClassifier::score(const FeatureMatrix& X) const { return forestScore(model_, X); }
LabelVector ForestClassifier::predict(const FeatureMatrix& X) const { return forestPredict(model_, X); }

void ForestClassifier::write(std::ostream& out) const {
    out << "trees " << model_.trees.size() << '\n';
    out << "depth " << model_.config.maxDepth << '\n';
    out << "minleaf " << model_.config.minSamplesLeaf << '\n';
    out << "seed " << model_.config.seed << '\n';
    for (const auto& tree : model_.trees) writeTreeNodes(out, tree.nodes);
}

void ForestClassifier::read(std::istream& in) {
    model_ = ForestModel{};
    const std::size_t count = std::stoull(ser::expectLine(in, "trees").at(0));
    model_.config.maxDepth = std::stoull(ser::expectLine(in, "depth").at(0));
    model_.config.minSamplesLeaf = std::stoull(ser::expectLine(in, "minleaf").at(0));
    model_.config.seed = std::stoull(ser::expectLine(in, "seed").at(0));
    model_.config.nTrees = count;
    for (std::size_t t = 0; t < count; ++t) {
        TreeModel tree;
        tree.config = TreeConfig{model_.config.maxDepth, model_.config.minSamplesLeaf};
        tree.nodes = readTreeNodes(in);
        model_.trees.push_back(std::move(tree));
    }
    config_ = model_.config;
}

void GbtClassifier::fit(const FeatureMatrix& X, const LabelVector& y) {
    Stopwatch watch;
    model_ = gbtFit(X, y, config_);
    info_.trainSeconds = watch.seconds();
    info_.iterations = model_.stages.size();
}

std::vector<double> GbtClassifier::score(const FeatureMatrix& X) const { return gbtScore(model_, X); }
LabelVector GbtClassifier::predict(const FeatureMatrix& X) const { return gbtPredict(model_, X); }

void GbtClassifier::write(std::ostream& out) const {
    out << "stages " << model_.stages.size() << '\n';
    out << "rate " << ser::fmtDouble(model_.config.learningRate) << '\n';
    out << "depth " << model_.config.maxDepth << '\n';
    out << "init " << ser::fmtDouble(model_.initLogOdds) << '\n';
    for (const auto& tree : model_.stages) writeRegTree(out, tree);
}

void GbtClassifier::read(std::istream& in) {
    model_ = GbtModel{};
    const std::size_t count = std::stoull(ser::expectLine(in, "stages").at(0));
    model_.config.learningRate = ser::parseDouble(ser::expectLine(in, "rate").at(0));
    model_.config.maxDepth = std::stoull(ser::expectLine(in, "depth").at(0));
    model_.config.nStages = count;
    model_.initLogOdds = ser::parseDouble(ser::expectLine(in, "init").at(0));
    for (std::size_t s = 0; s < count; ++s) model_.stages.push_back(readRegTree(in));
    config_ = model_.config;
}

}  // namespace ofsulr
