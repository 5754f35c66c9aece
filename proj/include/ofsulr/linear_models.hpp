#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ofsulr/classifier.hpp"
#include "ofsulr/matrix.hpp"

namespace ofsulr {

enum class Penalty { None, L1, L2 };
enum class LogRegSolver { Gd, Newton };

Penalty penaltyFromName(const std::string& name);
std::string penaltyName(Penalty p);
LogRegSolver solverFromName(const std::string& name);
std::string solverName(LogRegSolver s);

struct LogRegConfig {
    Penalty penalty = Penalty::L2;
    double c = 1.0;  // inverse regularization strength
    LogRegSolver solver = LogRegSolver::Gd;
    double tol = 1e-6;
    std::size_t maxIter = 1000;
};

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    LogRegConfig config;
    bool converged = false;
    std::size_t iterations = 0;
};

// Mean log-loss plus the penalty term: (1/n) sum loss + (1/(2Cn))||w||^2
// for l2, (1/(Cn))||w||_1 for l1. The bias is never penalized.
double logregObjective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                       const LabelVector& y, Penalty penalty, double c);

// Gradient of the smooth part (loss plus l2 term); valid for penalties
// none and l2.
void logregGradient(std::span<const double> weights, double bias, const FeatureMatrix& X,
                    const LabelVector& y, Penalty penalty, double c,
                    std::vector<double>& gradWeights, double& gradBias);

// gd: full-batch gradient descent with a backtracking step (proximal
// soft-threshold under l1). newton: iteratively reweighted least squares.
// l1+newton is rejected. Stops when the gradient infinity-norm (or the
// proximal-step map under l1) drops below tol.
LogRegModel logregFit(const FeatureMatrix& X, const LabelVector& y, const LogRegConfig& config = {});

std::vector<double> logregPredictProba(const LogRegModel& model, const FeatureMatrix& X);
LabelVector logregPredict(const LogRegModel& model, const FeatureMatrix& X);

struct SvmConfig {
    double c = 1.0;
    std::size_t epochs = 200;
    std::uint64_t seed = 0;
};

struct LinearSvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    SvmConfig config;
    bool converged = false;  // objective stable within 1% over the last 10% of epochs
    std::size_t epochs = 0;
};

// (1/(2Cn))||w||^2 plus mean hinge loss on labels mapped to {-1,+1}.
double svmObjective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                    const LabelVector& y, double c);

// Deterministic full-batch subgradient descent with a decaying step.
LinearSvmModel svmFit(const FeatureMatrix& X, const LabelVector& y, const SvmConfig& config = {});

std::vector<double> svmDecision(const LinearSvmModel& model, const FeatureMatrix& X);

class LogRegClassifier : public Classifier {
public:
    LogRegClassifier() = default;
    explicit LogRegClassifier(const LogRegConfig& config) : config_(config) {}

    std::string kind() const override { return "logreg"; }
    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    LabelVector predict(const FeatureMatrix& X) const override;
    void write(std::ostream& out) const override;
    void read(std::istream& in) override;

    const LogRegModel& model() const { return model_; }

private:
    LogRegConfig config_;
    LogRegModel model_;
};

class SvmClassifier : public Classifier {
public:
    SvmClassifier() = default;
    explicit SvmClassifier(const SvmConfig& config) : config_(config) {}

    std::string kind() const override { return "svm"; }
    void fit(const FeatureMatrix& X, const LabelVector& y) override;
    std::vector<double> score(const FeatureMatrix& X) const override;
    LabelVector predict(const FeatureMatrix& X) const override;
    void write(std::ostream& out) const override;
    void read(std::istream& in) override;

    const LinearSvmModel& model() const { return model_; }

private:
    SvmConfig config_;
    LinearSvmModel model_;
};

}  // namespace ofsulr
