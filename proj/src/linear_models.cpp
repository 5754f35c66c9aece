#include "ofsulr/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "ofsulr/error.hpp"
#include "ofsulr/serialize.hpp"

namespace ofsulr {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z, computed without overflow.
double logLossTerm(double z, int y) {
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - static_cast<double>(y) * z;
}

double dot(std::span<const double> w, std::span<const double> x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * x[i];
    return sum;
}

void checkBinary(const LabelVector& y) {
    for (int v : y) {
        if (v != 0 && v != 1) throw DataError("labels must be binary (0/1)");
    }
}

double infNorm(const std::vector<double>& v, double extra) {
    double out = std::abs(extra);
    for (double x : v) out = std::max(out, std::abs(x));
    return out;
}

// Cholesky solve for the (d+1)-dimensional Newton system.
std::vector<double> solveSpd(std::vector<std::vector<double>>& a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = a[i][j];
            for (std::size_t k = 0; k < j; ++k) sum -= a[i][k] * a[j][k];
            if (i == j) {
                if (sum <= 0.0) throw NumericError("Newton system is not positive definite");
                a[i][i] = std::sqrt(sum);
            } else {
                a[i][j] = sum / a[j][j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::size_t k = 0; k < i; ++k) sum -= a[i][k] * b[k];
        b[i] = sum / a[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double sum = b[i];
        for (std::size_t k = i + 1; k < n; ++k) sum -= a[k][i] * b[k];
        b[i] = sum / a[i][i];
    }
    return b;
}

}  // namespace

Penalty penaltyFromName(const std::string& name) {
    if (name == "l1") return Penalty::L1;
    if (name == "l2") return Penalty::L2;
    if (name == "none") return Penalty::None;
    throw ConfigError("unknown penalty: " + name);
}

std::string penaltyName(Penalty p) {
    switch (p) {
        case Penalty::L1: return "l1";
        case Penalty::L2: return "l2";
        case Penalty::None: return "none";
    }
    return "none";
}

LogRegSolver solverFromName(const std::string& name) {
    if (name == "gd") return LogRegSolver::Gd;
    if (name == "newton") return LogRegSolver::Newton;
    throw ConfigError("unknown solver: " + name);
}

std::string solverName(LogRegSolver s) { return s == LogRegSolver::Gd ? "gd" : "newton"; }

double logregObjective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                       const LabelVector& y, Penalty penalty, double c) {
    const auto n = static_cast<double>(X.rows());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        loss += logLossTerm(dot(weights, X.values.row(i)) + bias, y[i]);
    }
    loss /= n;
    if (penalty == Penalty::L2) {
        double sq = 0.0;
        for (double w : weights) sq += w * w;
        loss += sq / (2.0 * c * n);
    } else if (penalty == Penalty::L1) {
        double l1 = 0.0;
        for (double w : weights) l1 += std::abs(w);
        loss += l1 / (c * n);
    }
    return loss;
}

void logregGradient(std::span<const double> weights, double bias, const FeatureMatrix& X,
                    const LabelVector& y, Penalty penalty, double c,
                    std::vector<double>& gradWeights, double& gradBias) {
    if (penalty == Penalty::L1) throw ConfigError("l1 penalty has no smooth gradient");
    const std::size_t d = X.cols();
    const auto n = static_cast<double>(X.rows());
    gradWeights.assign(d, 0.0);
    gradBias = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto row = X.values.row(i);
        const double residual = sigmoid(dot(weights, row) + bias) - static_cast<double>(y[i]);
        for (std::size_t j = 0; j < d; ++j) gradWeights[j] += residual * row[j];
        gradBias += residual;
    }
    for (std::size_t j = 0; j < d; ++j) gradWeights[j] /= n;
    gradBias /= n;
    if (penalty == Penalty::L2) {
        for (std::size_t j = 0; j < d; ++j) gradWeights[j] += weights[j] / (c * n);
    }
}

namespace {

LogRegModel fitGd(const FeatureMatrix& X, const LabelVector& y, const LogRegConfig& config) {
    const std::size_t d = X.cols();
    const auto n = static_cast<double>(X.rows());
    const bool l1 = config.penalty == Penalty::L1;
    const double lambda1 = l1 ? 1.0 / (config.c * n) : 0.0;
    const Penalty smoothPenalty = l1 ? Penalty::None : config.penalty;

    LogRegModel model;
    model.config = config;
    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    std::vector<double> grad(d);
    double gradBias = 0.0;
    std::vector<double> trialW(d);

    double objective = logregObjective(model.weights, model.bias, X, y, config.penalty, config.c);

    for (std::size_t iter = 1; iter <= config.maxIter; ++iter) {
        model.iterations = iter;
        logregGradient(model.weights, model.bias, X, y, smoothPenalty, config.c, grad, gradBias);

        double step = 1.0;
        double trialObjective = 0.0;
        double trialBias = 0.0;
        double moveSq = 0.0;
        for (int halvings = 0;; ++halvings) {
            moveSq = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double w = model.weights[j] - step * grad[j];
                if (l1) {
                    const double shrink = step * lambda1;
                    w = w > shrink ? w - shrink : (w < -shrink ? w + shrink : 0.0);
                }
                trialW[j] = w;
                const double delta = w - model.weights[j];
                moveSq += delta * delta;
            }
            trialBias = model.bias - step * gradBias;
            moveSq += (trialBias - model.bias) * (trialBias - model.bias);

            trialObjective = logregObjective(trialW, trialBias, X, y, config.penalty, config.c);
            // Sufficient decrease on the full objective.
            if (trialObjective <= objective - 1e-4 * moveSq / std::max(step, 1e-12) || halvings >= 50) break;
            step *= 0.5;
        }

        if (trialObjective > objective) break;  // no acceptable step left

        // Convergence: gradient norm for smooth penalties, step map for l1.
        const double stationarity = l1 ? std::sqrt(moveSq) / std::max(step, 1e-12)
                                       : infNorm(grad, gradBias);
        model.weights = trialW;
        model.bias = trialBias;
        objective = trialObjective;
        if (stationarity < config.tol) {
            model.converged = true;
            break;
        }
    }
    return model;
}

LogRegModel fitNewton(const FeatureMatrix& X, const LabelVector& y, const LogRegConfig& config) {
    const std::size_t d = X.cols();
    const auto n = static_cast<double>(X.rows());

    LogRegModel model;
    model.config = config;
    model.weights.assign(d, 0.0);
    model.bias = 0.0;

    std::vector<double> grad(d);
    double gradBias = 0.0;
    std::vector<double> p(X.rows());
    double objective = logregObjective(model.weights, model.bias, X, y, config.penalty, config.c);

    for (std::size_t iter = 1; iter <= config.maxIter; ++iter) {
        model.iterations = iter;
        logregGradient(model.weights, model.bias, X, y, config.penalty, config.c, grad, gradBias);
        if (infNorm(grad, gradBias) < config.tol) {
            model.converged = true;
            break;
        }

        for (std::size_t i = 0; i < X.rows(); ++i) {
            p[i] = sigmoid(dot(model.weights, X.values.row(i)) + model.bias);
        }

        // Hessian over [w, b], ridge-damped for safety.
        std::vector<std::vector<double>> h(d + 1, std::vector<double>(d + 1, 0.0));
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const double wgt = std::max(p[i] * (1.0 - p[i]), 1e-12);
            const auto row = X.values.row(i);
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = a; b < d; ++b) h[a][b] += wgt * row[a] * row[b];
                h[a][d] += wgt * row[a];
            }
            h[d][d] += wgt;
        }
        for (std::size_t a = 0; a < d + 1; ++a) {
            for (std::size_t b = a; b < d + 1; ++b) {
                h[a][b] /= n;
                h[b][a] = h[a][b];
            }
        }
        if (config.penalty == Penalty::L2) {
            for (std::size_t a = 0; a < d; ++a) h[a][a] += 1.0 / (config.c * n);
        }
        for (std::size_t a = 0; a < d + 1; ++a) h[a][a] += 1e-10;

        std::vector<double> rhs(d + 1);
        for (std::size_t j = 0; j < d; ++j) rhs[j] = grad[j];
        rhs[d] = gradBias;
        const std::vector<double> direction = solveSpd(h, std::move(rhs));

        // Damped step: halve until the objective does not increase.
        double step = 1.0;
        std::vector<double> trialW(d);
        double trialBias = 0.0;
        double trialObjective = 0.0;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t j = 0; j < d; ++j) trialW[j] = model.weights[j] - step * direction[j];
            trialBias = model.bias - step * direction[d];
            trialObjective = logregObjective(trialW, trialBias, X, y, config.penalty, config.c);
            if (trialObjective <= objective || halvings >= 50) break;
            step *= 0.5;
        }
        if (trialObjective > objective) break;

        model.weights = trialW;
        model.bias = trialBias;
        objective = trialObjective;
    }
    return model;
}

}  // namespace

LogRegModel logregFit(const FeatureMatrix& X, const LabelVector& y, const LogRegConfig& config) {
    if (X.rows() != y.size()) throw DataError("logreg: X and y row counts differ");
    if (X.rows() == 0) throw DataError("logreg: empty training data");
    if (config.c <= 0.0) throw ConfigError("logreg: C must be positive");
    checkBinary(y);
    if (config.penalty == Penalty::L1 && config.solver == LogRegSolver::Newton) {
        throw ConfigError("l1 penalty is not supported by the newton solver");
    }
    return config.solver == LogRegSolver::Gd ? fitGd(X, y, config) : fitNewton(X, y, config);
}

std::vector<double> logregPredictProba(const LogRegModel& model, const FeatureMatrix& X) {
    if (X.cols() != model.weights.size()) throw DataError("logreg: dimension mismatch");
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = sigmoid(dot(model.weights, X.values.row(i)) + model.bias);
    }
    return out;
}

LabelVector logregPredict(const LogRegModel& model, const FeatureMatrix& X) {
    const std::vector<double> proba = logregPredictProba(model, X);
    LabelVector out(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= 0.5 ? 1 : 0;
    return out;
}

double svmObjective(std::span<const double> weights, double bias, const FeatureMatrix& X,
                    const LabelVector& y, double c) {
    const auto n = static_cast<double>(X.rows());
    double hinge = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double s = y[i] == 1 ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - s * (dot(weights, X.values.row(i)) + bias));
    }
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    return sq / (2.0 * c * n) + hinge / n;
}

LinearSvmModel svmFit(const FeatureMatrix& X, const LabelVector& y, const SvmConfig& config) {
    if (X.rows() != y.size()) throw DataError("svm: X and y row counts differ");
    if (X.rows() == 0) throw DataError("svm: empty training data");
    if (config.c <= 0.0) throw ConfigError("svm: C must be positive");
    checkBinary(y);

    const std::size_t d = X.cols();
    const auto n = static_cast<double>(X.rows());
    const double lambda = 1.0 / (config.c * n);

    LinearSvmModel model;
    model.config = config;
    model.weights.assign(d, 0.0);

    std::vector<double> grad(d);
    const std::size_t tailStart = config.epochs - std::max<std::size_t>(1, config.epochs / 10);
    double tailMin = std::numeric_limits<double>::infinity();
    double tailMax = -std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        model.epochs = epoch;
        std::fill(grad.begin(), grad.end(), 0.0);
        double gradBias = 0.0;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            const auto row = X.values.row(i);
            const double s = y[i] == 1 ? 1.0 : -1.0;
            if (s * (dot(model.weights, row) + model.bias) < 1.0) {
                for (std::size_t j = 0; j < d; ++j) grad[j] -= s * row[j];
                gradBias -= s;
            }
        }
        for (std::size_t j = 0; j < d; ++j) grad[j] = grad[j] / n + lambda * model.weights[j];
        gradBias /= n;

        const double step = 1.0 / (1.0 + lambda * static_cast<double>(epoch));
        for (std::size_t j = 0; j < d; ++j) model.weights[j] -= step * grad[j];
        model.bias -= step * gradBias;

        if (epoch > tailStart) {
            const double obj = svmObjective(model.weights, model.bias, X, y, config.c);
            tailMin = std::min(tailMin, obj);
            tailMax = std::max(tailMax, obj);
        }
    }

    model.converged = std::isfinite(tailMax) && tailMax - tailMin <= 0.01 * std::max(std::abs(tailMax), 1e-12);
    return model;
}

std::vector<double> svmDecision(const LinearSvmModel& model, const FeatureMatrix& X) {
    if (X.cols() != model.weights.size()) throw DataError("svm: dimension mismatch");
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        out[i] = dot(model.weights, X.values.row(i)) + model.bias;
    }
    return out;
}

void LogRegClassifier::fit(const FeatureMatrix& X, const LabelVector& y) {
    Stopwatch watch;
    model_ = logregFit(X, y, config_);
    info_.trainSeconds = watch.seconds();
    info_.iterations = model_.iterations;
}

std::vector<double> LogRegClassifier::score(const FeatureMatrix& X) const {
    return logregPredictProba(model_, X);
}

LabelVector LogRegClassifier::predict(const FeatureMatrix& X) const { return logregPredict(model_, X); }

void LogRegClassifier::write(std::ostream& out) const {
    out << "penalty " << penaltyName(model_.config.penalty) << '\n';
    out << "c " << ser::fmtDouble(model_.config.c) << '\n';
    out << "solver " << solverName(model_.config.solver) << '\n';
    out << "bias " << ser::fmtDouble(model_.bias) << '\n';
    out << "weights";
    for (double w : model_.weights) out << ' ' << ser::fmtDouble(w);
    out << '\n';
}

void LogRegClassifier::read(std::istream& in) {
    model_ = LogRegModel{};
    model_.config.penalty = penaltyFromName(ser::expectLine(in, "penalty").at(0));
    model_.config.c = ser::parseDouble(ser::expectLine(in, "c").at(0));
    model_.config.solver = solverFromName(ser::expectLine(in, "solver").at(0));
    model_.bias = ser::parseDouble(ser::expectLine(in, "bias").at(0));
    for (const auto& token : ser::expectLine(in, "weights")) {
        model_.weights.push_back(ser::parseDouble(token));
    }
    config_ = model_.config;
}

void SvmClassifier::fit(const FeatureMatrix& X, const LabelVector& y) {
    Stopwatch watch;
    model_ = svmFit(X, y, config_);
    info_.trainSeconds = watch.seconds();
    info_.iterations = model_.epochs;
}

std::vector<double> SvmClassifier::score(const FeatureMatrix& X) const { return svmDecision(model_, X); }

LabelVector SvmClassifier::predict(const FeatureMatrix& X) const {
    const std::vector<double> decision = svmDecision(model_, X);
    LabelVector out(decision.size());
    for (std::size_t i = 0; i < decision.size(); ++i) out[i] = decision[i] >= 0.0 ? 1 : 0;
    return out;
}

void SvmClassifier::write(std::ostream& out) const {
    out << "c " << ser::fmtDouble(model_.config.c) << '\n';
    out << "bias " << ser::fmtDouble(model_.bias) << '\n';
    out << "weights";
    for (double w : model_.weights) out << ' ' << ser::fmtDouble(w);
    out << '\n';
}

void SvmClassifier::read(std::istream& in) {
    model_ = LinearSvmModel{};
    model_.config.c = ser::parseDouble(ser::expectLine(in, "c").at(0));
    model_.bias = ser::parseDouble(ser::expectLine(in, "bias").at(0));
    for (const auto& token : ser::expectLine(in, "weights")) {
        model_.weights.push_back(ser::parseDouble(token));
    }
    config_ = model_.config;
}

}  // namespace ofsulr
