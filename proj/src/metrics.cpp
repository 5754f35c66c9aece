#include "ofsulr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ofsulr/error.hpp"

namespace ofsulr {

Confusion confusion(const LabelVector& yTrue, const LabelVector& yPred) {
    if (yTrue.size() != yPred.size()) throw DataError("confusion: label vectors differ in length");
    Confusion c;
    for (std::size_t i = 0; i < yTrue.size(); ++i) {
        if (yTrue[i] != 0 && yTrue[i] != 1) throw DataError("confusion: labels must be binary");
        if (yPred[i] != 0 && yPred[i] != 1) throw DataError("confusion: predictions must be binary");
        if (yTrue[i] == 1) {
            yPred[i] == 1 ? ++c.tp : ++c.fn;
        } else {
            yPred[i] == 1 ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

double accuracy(const Confusion& c) {
    const std::size_t n = c.total();
    return n == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
}

double precision(const Confusion& c) {
    const std::size_t denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const Confusion& c) {
    const std::size_t denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1Score(const Confusion& c) {
    const double pr = precision(c);
    const double re = recall(c);
    return pr + re == 0.0 ? 0.0 : 2.0 * pr * re / (pr + re);
}

RocCurve rocAuc(const std::vector<double>& scores, const LabelVector& yTrue) {
    if (scores.size() != yTrue.size()) throw DataError("roc: scores and labels differ in length");
    std::size_t positives = 0;
    std::size_t negatives = 0;
    for (std::size_t i = 0; i < yTrue.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DataError("roc: non-finite score");
        if (yTrue[i] == 1) ++positives;
        else if (yTrue[i] == 0) ++negatives;
        else throw DataError("roc: labels must be binary");
    }
    if (positives == 0 || negatives == 0) throw DataError("roc: AUC undefined with a single class");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        // All rows tied at this score move together (one threshold step).
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            if (yTrue[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(negatives),
                                  static_cast<double>(tp) / static_cast<double>(positives));
    }

    double auc = 0.0;
    for (std::size_t p = 1; p < curve.points.size(); ++p) {
        const auto [x0, y0] = curve.points[p - 1];
        const auto [x1, y1] = curve.points[p];
        auc += (x1 - x0) * (y0 + y1) * 0.5;
    }
    curve.auc = auc;
    return curve;
}

EvalReport evaluate(const LabelVector& yTrue, const LabelVector& yPred,
                    const std::vector<double>* scores, double wallTimeSeconds) {
    EvalReport report;
    report.confusion = confusion(yTrue, yPred);
    report.accuracy = accuracy(report.confusion);
    report.precision = precision(report.confusion);
    report.recall = recall(report.confusion);
    report.f1 = f1Score(report.confusion);
    report.wallTimeSeconds = wallTimeSeconds;
    if (scores != nullptr) {
        const bool bothClasses =
            std::find(yTrue.begin(), yTrue.end(), 1) != yTrue.end() &&
            std::find(yTrue.begin(), yTrue.end(), 0) != yTrue.end();
        if (bothClasses) {
            RocCurve curve = rocAuc(*scores, yTrue);
            report.rocPoints = std::move(curve.points);
            report.auc = curve.auc;
        }
    }
    return report;
}

std::string evalReportJson(const EvalReport& report, bool includeRoc) {
    nlohmann::ordered_json j;
    if (!report.classifier.empty()) j["classifier"] = report.classifier;
    j["wall_time_s"] = report.wallTimeSeconds;
    j["confusion"] = {{"tp", report.confusion.tp},
                      {"tn", report.confusion.tn},
                      {"fp", report.confusion.fp},
                      {"fn", report.confusion.fn}};
    j["accuracy"] = report.accuracy;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    if (report.auc) j["auc"] = *report.auc;
    if (includeRoc && !report.rocPoints.empty()) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [fpr, tpr] : report.rocPoints) arr.push_back({fpr, tpr});
        j["roc"] = std::move(arr);
    }
    return j.dump();
}

std::string evalReportCsvHeader() { return "Classifier,Avg. time (s),Ac,Fm,Pr,Re,AUC"; }

std::string evalReportCsvRow(const EvalReport& report) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << report.classifier << ',' << report.wallTimeSeconds << ',' << report.accuracy << ',' << report.f1
       << ',' << report.precision << ',' << report.recall << ',';
    if (report.auc) os << *report.auc;
    else os << "n/a";
    return os.str();
}

}  // namespace ofsulr
