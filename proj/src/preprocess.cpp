#include "ofsulr/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ofsulr/error.hpp"
#include "ofsulr/rng.hpp"

namespace ofsulr {

namespace {

bool kindIsNumeric(ColumnKind kind) {
    return kind == ColumnKind::Integer || kind == ColumnKind::Real || kind == ColumnKind::Timestamp;
}

}  // namespace

void Encoder::fit(const Table& table) {
    codecs_.clear();
    codecs_.reserve(table.columnCount());
    for (const auto& col : table.columns()) {
        ColumnCodec codec;
        codec.name = col.name;
        if (kindIsNumeric(col.kind)) {
            codec.numeric = true;
        } else if (col.kind == ColumnKind::Mixed) {
            throw DataError("cannot encode mixed-kind column '" + col.name + "'; clean it first");
        } else {
            std::unordered_map<std::string, std::size_t> seen;
            for (const auto& cell : col.cells) {
                if (isMissing(cell)) throw DataError("missing cell in column '" + col.name + "'; encode expects a cleaned table");
                const std::string v = cellToString(cell);
                if (seen.emplace(v, codec.levels.size()).second) codec.levels.push_back(v);
            }
            if (policy_ == EncodingPolicy::OneHot && codec.levels.size() > oneHotCap_) {
                throw DataError("column '" + col.name + "' has " + std::to_string(codec.levels.size()) +
                                " levels, above the one-hot cap of " + std::to_string(oneHotCap_));
            }
        }
        codecs_.push_back(std::move(codec));
    }
}

FeatureMatrix Encoder::apply(const Table& table) const {
    if (codecs_.empty()) throw ConfigError("encoder not fitted");

    std::vector<const Column*> sources;
    sources.reserve(codecs_.size());
    for (const auto& codec : codecs_) {
        const int idx = table.findColumn(codec.name);
        if (idx < 0) throw DataError("table lacks column '" + codec.name + "' expected by the encoder");
        sources.push_back(&table.column(static_cast<std::size_t>(idx)));
    }

    std::size_t width = 0;
    for (const auto& codec : codecs_) {
        if (codec.numeric || policy_ == EncodingPolicy::Label) {
            width += 1;
        } else {
            width += codec.levels.size();
        }
    }

    FeatureMatrix out;
    out.values = Matrix(table.rowCount(), width);
    out.featureNames.reserve(width);

    std::size_t base = 0;
    for (std::size_t ci = 0; ci < codecs_.size(); ++ci) {
        const auto& codec = codecs_[ci];
        const auto& cells = sources[ci]->cells;
        if (codec.numeric) {
            out.featureNames.push_back(codec.name);
            for (std::size_t r = 0; r < cells.size(); ++r) {
                if (isMissing(cells[r])) throw DataError("missing cell in column '" + codec.name + "'");
                const double v = cellAsDouble(cells[r]);
                if (!std::isfinite(v)) throw DataError("non-finite value in column '" + codec.name + "'");
                out.values(r, base) = v;
            }
            base += 1;
            continue;
        }

        std::unordered_map<std::string, std::size_t> codeOf;
        codeOf.reserve(codec.levels.size());
        for (std::size_t i = 0; i < codec.levels.size(); ++i) codeOf.emplace(codec.levels[i], i);

        if (policy_ == EncodingPolicy::Label) {
            out.featureNames.push_back(codec.name);
            for (std::size_t r = 0; r < cells.size(); ++r) {
                if (isMissing(cells[r])) throw DataError("missing cell in column '" + codec.name + "'");
                const auto it = codeOf.find(cellToString(cells[r]));
                if (it == codeOf.end()) {
                    throw DataError("unseen category '" + cellToString(cells[r]) + "' in column '" + codec.name + "'");
                }
                out.values(r, base) = static_cast<double>(it->second);
            }
            base += 1;
        } else {
            for (const auto& level : codec.levels) out.featureNames.push_back(codec.name + "=" + level);
            for (std::size_t r = 0; r < cells.size(); ++r) {
                if (isMissing(cells[r])) throw DataError("missing cell in column '" + codec.name + "'");
                const auto it = codeOf.find(cellToString(cells[r]));
                if (it == codeOf.end()) {
                    throw DataError("unseen category '" + cellToString(cells[r]) + "' in column '" + codec.name + "'");
                }
                out.values(r, base + it->second) = 1.0;
            }
            base += codec.levels.size();
        }
    }
    return out;
}

std::vector<std::string> Encoder::inputColumns() const {
    std::vector<std::string> out;
    out.reserve(codecs_.size());
    for (const auto& codec : codecs_) out.push_back(codec.name);
    return out;
}

void Encoder::setFitted(EncodingPolicy policy, std::size_t cap, std::vector<ColumnCodec> codecs) {
    policy_ = policy;
    oneHotCap_ = cap;
    codecs_ = std::move(codecs);
}

FeatureMatrix encode(const Table& table, EncodingPolicy policy, std::size_t oneHotCap) {
    Encoder enc(policy, oneHotCap);
    enc.fit(table);
    return enc.apply(table);
}

Scaler Scaler::fit(const FeatureMatrix& X, ScalerKind kind) {
    if (X.rows() == 0) throw DataError("cannot fit scaler on an empty matrix");
    Scaler s;
    s.kind_ = kind;
    const std::size_t d = X.cols();
    s.statA_.assign(d, 0.0);
    s.statB_.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        if (kind == ScalerKind::MinMax) {
            double lo = X.values(0, c);
            double hi = lo;
            for (std::size_t r = 1; r < X.rows(); ++r) {
                lo = std::min(lo, X.values(r, c));
                hi = std::max(hi, X.values(r, c));
            }
            s.statA_[c] = lo;
            s.statB_[c] = hi;
        } else {
            double mean = 0.0;
            for (std::size_t r = 0; r < X.rows(); ++r) mean += X.values(r, c);
            mean /= static_cast<double>(X.rows());
            double var = 0.0;
            for (std::size_t r = 0; r < X.rows(); ++r) {
                const double dv = X.values(r, c) - mean;
                var += dv * dv;
            }
            var /= static_cast<double>(X.rows());  // population denominator
            s.statA_[c] = mean;
            s.statB_[c] = std::sqrt(var);
        }
    }
    return s;
}

FeatureMatrix Scaler::apply(const FeatureMatrix& X) const {
    if (statA_.size() != X.cols()) throw DataError("scaler dimension mismatch");
    FeatureMatrix out = X;
    for (std::size_t c = 0; c < X.cols(); ++c) {
        if (kind_ == ScalerKind::MinMax) {
            const double range = statB_[c] - statA_[c];
            for (std::size_t r = 0; r < X.rows(); ++r) {
                out.values(r, c) = range > 0.0 ? (X.values(r, c) - statA_[c]) / range : 0.0;
            }
        } else {
            const double sd = statB_[c];
            for (std::size_t r = 0; r < X.rows(); ++r) {
                out.values(r, c) = sd > 0.0 ? (X.values(r, c) - statA_[c]) / sd : 0.0;
            }
        }
    }
    return out;
}

FeatureMatrix Scaler::inverseApply(const FeatureMatrix& X) const {
    if (statA_.size() != X.cols()) throw DataError("scaler dimension mismatch");
    FeatureMatrix out = X;
    for (std::size_t c = 0; c < X.cols(); ++c) {
        if (kind_ == ScalerKind::MinMax) {
            const double range = statB_[c] - statA_[c];
            for (std::size_t r = 0; r < X.rows(); ++r) {
                out.values(r, c) = range > 0.0 ? X.values(r, c) * range + statA_[c] : statA_[c];
            }
        } else {
            const double sd = statB_[c];
            for (std::size_t r = 0; r < X.rows(); ++r) {
                out.values(r, c) = sd > 0.0 ? X.values(r, c) * sd + statA_[c] : statA_[c];
            }
        }
    }
    return out;
}

void Scaler::setFitted(ScalerKind kind, std::vector<double> a, std::vector<double> b) {
    kind_ = kind;
    statA_ = std::move(a);
    statB_ = std::move(b);
}

ScalerKind scalerKindFromName(const std::string& name) {
    if (name == "minmax") return ScalerKind::MinMax;
    if (name == "zscore") return ScalerKind::ZScore;
    throw ConfigError("unknown scaler kind: " + name);
}

std::string scalerKindName(ScalerKind kind) {
    return kind == ScalerKind::MinMax ? "minmax" : "zscore";
}

SplitIndices split(std::size_t n, double ratio, std::uint64_t seed) {
    if (n < 2) throw DataError("need at least 2 rows to split");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must be in (0, 1)");

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    const auto trainCount = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    SplitIndices out;
    out.seed = seed;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(trainCount));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(trainCount), perm.end());
    return out;
}

}  // namespace ofsulr
