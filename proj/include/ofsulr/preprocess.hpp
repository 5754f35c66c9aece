#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofsulr/matrix.hpp"
#include "ofsulr/table.hpp"

namespace ofsulr {

enum class EncodingPolicy { Label, OneHot };

// Turns a cleaned table into numbers. Numeric columns pass through;
// categorical/text columns become first-appearance label codes or one-hot
// blocks. The learned mapping is reusable on later data (streaming).
class Encoder {
public:
    struct ColumnCodec {
        std::string name;
        bool numeric = false;
        std::vector<std::string> levels;  // code = index of first appearance
    };

    Encoder() = default;
    Encoder(EncodingPolicy policy, std::size_t oneHotCap) : policy_(policy), oneHotCap_(oneHotCap) {}

    void fit(const Table& table);
    FeatureMatrix apply(const Table& table) const;

    EncodingPolicy policy() const { return policy_; }
    std::size_t oneHotCap() const { return oneHotCap_; }
    const std::vector<ColumnCodec>& codecs() const { return codecs_; }
    std::vector<std::string> inputColumns() const;

    void setFitted(EncodingPolicy policy, std::size_t cap, std::vector<ColumnCodec> codecs);

private:
    EncodingPolicy policy_ = EncodingPolicy::Label;
    std::size_t oneHotCap_ = 64;
    std::vector<ColumnCodec> codecs_;
};

FeatureMatrix encode(const Table& table, EncodingPolicy policy = EncodingPolicy::Label, std::size_t oneHotCap = 64);

enum class ScalerKind { MinMax, ZScore };

// Per-feature affine rescaling. Statistics come from the fit data only;
// applying to held-out data can land outside [0,1] (no clamping). Constant
// features map to 0 under both kinds. ZScore uses the population stddev.
class Scaler {
public:
    Scaler() = default;

    static Scaler fit(const FeatureMatrix& X, ScalerKind kind);

    FeatureMatrix apply(const FeatureMatrix& X) const;
    // Undo via the stored statistics (exact up to roundoff where defined).
    FeatureMatrix inverseApply(const FeatureMatrix& X) const;

    ScalerKind kind() const { return kind_; }
    // minmax: (min, max); zscore: (mean, stddev).
    const std::vector<double>& statA() const { return statA_; }
    const std::vector<double>& statB() const { return statB_; }

    void setFitted(ScalerKind kind, std::vector<double> a, std::vector<double> b);

private:
    ScalerKind kind_ = ScalerKind::MinMax;
    std::vector<double> statA_;
    std::vector<double> statB_;
};

ScalerKind scalerKindFromName(const std::string& name);
std::string scalerKindName(ScalerKind kind);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::uint64_t seed = 0;
};

// Uniformly random permutation under the seed; the first floor(ratio*n)
// indices form the train set.
SplitIndices split(std::size_t n, double ratio, std::uint64_t seed);

}  // namespace ofsulr
