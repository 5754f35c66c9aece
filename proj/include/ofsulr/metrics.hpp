#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ofsulr/matrix.hpp"

namespace ofsulr {

struct Confusion {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    Confusion& operator+=(const Confusion& other) {
        tp += other.tp;
        tn += other.tn;
        fp += other.fp;
        fn += other.fn;
        return *this;
    }
    friend bool operator==(const Confusion&, const Confusion&) = default;
};

// Class 1 is the positive class.
Confusion confusion(const LabelVector& yTrue, const LabelVector& yPred);

// Zero-denominator convention: precision/recall/f1 are 0 when undefined.
double accuracy(const Confusion& c);
double precision(const Confusion& c);
double recall(const Confusion& c);
double f1Score(const Confusion& c);

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0.0;
};

// Threshold sweep over the sorted unique scores, descending; tied scores
// collapse into one step. AUC by the trapezoid rule. Errors when yTrue has a
// single class.
RocCurve rocAuc(const std::vector<double>& scores, const LabelVector& yTrue);

struct EvalReport {
    std::string classifier;
    Confusion confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<std::pair<double, double>> rocPoints;
    std::optional<double> auc;  // absent when scores or both classes were unavailable
    double wallTimeSeconds = 0.0;
};

EvalReport evaluate(const LabelVector& yTrue, const LabelVector& yPred,
                    const std::vector<double>* scores = nullptr, double wallTimeSeconds = 0.0);

std::string evalReportJson(const EvalReport& report, bool includeRoc = false);
// One row in the comparison-table layout: Classifier, Avg. time, Ac, Fm, Pr, Re.
std::string evalReportCsvHeader();
std::string evalReportCsvRow(const EvalReport& report);

}  // namespace ofsulr
