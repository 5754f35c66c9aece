#pragma once

#include <chrono>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ofsulr/matrix.hpp"

namespace ofsulr {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct FitInfo {
    double trainSeconds = 0.0;
    std::size_t iterations = 0;
};

// Uniform fit/predict/score contract so model selection, comparison and
// streaming treat every classifier interchangeably. score() is a
// monotone-in-confidence real per row; predict() thresholds it per model.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual std::string kind() const = 0;
    virtual void fit(const FeatureMatrix& X, const LabelVector& y) = 0;
    virtual std::vector<double> score(const FeatureMatrix& X) const = 0;
    virtual LabelVector predict(const FeatureMatrix& X) const = 0;

    virtual void write(std::ostream& out) const = 0;
    virtual void read(std::istream& in) = 0;

    const FitInfo& fitInfo() const { return info_; }

protected:
    FitInfo info_;
};

// Default-constructs a classifier of the named kind, ready for read().
std::unique_ptr<Classifier> makeClassifier(const std::string& kind);

}  // namespace ofsulr
