#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ofsulr/csv.hpp"
#include "ofsulr/error.hpp"
#include "ofsulr/preprocess.hpp"

using namespace ofsulr;

namespace {

Table fromCsv(const std::string& text) {
    std::istringstream in(text);
    return parseCsv(in, "test");
}

FeatureMatrix matrixOf(std::vector<std::vector<double>> rows, std::vector<std::string> names) {
    FeatureMatrix out;
    out.values = Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) out.values(r, c) = rows[r][c];
    }
    out.featureNames = std::move(names);
    return out;
}

}  // namespace

TEST_CASE("label encoding assigns codes by first appearance") {
    const Table t = fromCsv("color\nred\nblue\nred\n");
    const FeatureMatrix m = encode(t);
    CHECK(m.values(0, 0) == 0.0);
    CHECK(m.values(1, 0) == 1.0);
    CHECK(m.values(2, 0) == 0.0);
}

TEST_CASE("numeric columns pass through unchanged") {
    const Table t = fromCsv("v\n1.5\n-2.25\n");
    const FeatureMatrix m = encode(t);
    CHECK(m.values(0, 0) == 1.5);
    CHECK(m.values(1, 0) == -2.25);
    CHECK(m.featureNames == std::vector<std::string>{"v"});
}

TEST_CASE("one-hot rows sum to one") {
    const Table t = fromCsv("c\na\nb\nc\nb\n");
    const FeatureMatrix m = encode(t, EncodingPolicy::OneHot);
    CHECK(m.cols() == 3);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            sum += m.values(r, c);
            CHECK((m.values(r, c) == 0.0 || m.values(r, c) == 1.0));
        }
        CHECK(sum == 1.0);
    }
}

TEST_CASE("one-hot cardinality cap is enforced") {
    const Table t = fromCsv("c\na\nb\nc\n");
    CHECK_THROWS_AS(encode(t, EncodingPolicy::OneHot, 2), DataError);
}

TEST_CASE("encode rejects missing cells and repeated calls are identical") {
    CHECK_THROWS_AS(encode(fromCsv("a\n1\n\n")), DataError);

    const Table t = fromCsv("a,b\n1,x\n2,y\n3,x\n");
    const FeatureMatrix m1 = encode(t);
    const FeatureMatrix m2 = encode(t);
    CHECK(m1.values == m2.values);
}

TEST_CASE("minmax maps fit data into the unit interval") {
    const FeatureMatrix X = matrixOf({{2.0}, {4.0}, {6.0}}, {"v"});
    const Scaler s = Scaler::fit(X, ScalerKind::MinMax);
    const FeatureMatrix out = s.apply(X);
    CHECK(out.values(0, 0) == 0.0);
    CHECK(out.values(1, 0) == 0.5);
    CHECK(out.values(2, 0) == 1.0);

    // Held-out values extend outside [0,1]; no clamping.
    const FeatureMatrix held = matrixOf({{8.0}}, {"v"});
    CHECK(s.apply(held).values(0, 0) == 1.5);
}

TEST_CASE("zscore uses the population denominator") {
    const FeatureMatrix X = matrixOf({{1.0}, {3.0}}, {"v"});
    const Scaler s = Scaler::fit(X, ScalerKind::ZScore);
    const FeatureMatrix out = s.apply(X);
    CHECK(out.values(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(out.values(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaled fit data has zero mean and unit variance per feature") {
    FeatureMatrix X = matrixOf({{1, 10}, {2, 20}, {3, 35}, {4, 41}, {5, 58}}, {"a", "b"});
    const Scaler s = Scaler::fit(X, ScalerKind::ZScore);
    const FeatureMatrix out = s.apply(X);
    for (std::size_t c = 0; c < out.cols(); ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < out.rows(); ++r) mean += out.values(r, c);
        mean /= static_cast<double>(out.rows());
        CHECK(std::abs(mean) < 1e-9);
        double var = 0.0;
        for (std::size_t r = 0; r < out.rows(); ++r) var += out.values(r, c) * out.values(r, c);
        var /= static_cast<double>(out.rows());
        CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("constant features map to zero under both scalers") {
    const FeatureMatrix X = matrixOf({{7.0}, {7.0}, {7.0}}, {"v"});
    for (ScalerKind kind : {ScalerKind::MinMax, ScalerKind::ZScore}) {
        const FeatureMatrix out = Scaler::fit(X, kind).apply(X);
        for (std::size_t r = 0; r < out.rows(); ++r) CHECK(out.values(r, 0) == 0.0);
    }
}

TEST_CASE("scaler inverse recovers the original data") {
    const FeatureMatrix X = matrixOf({{1, -4}, {2, 0}, {9, 3}, {4, 2}}, {"a", "b"});
    for (ScalerKind kind : {ScalerKind::MinMax, ScalerKind::ZScore}) {
        const Scaler s = Scaler::fit(X, kind);
        const FeatureMatrix back = s.inverseApply(s.apply(X));
        for (std::size_t r = 0; r < X.rows(); ++r) {
            for (std::size_t c = 0; c < X.cols(); ++c) {
                CHECK(back.values(r, c) == doctest::Approx(X.values(r, c)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("split honors the floor rule on the paper's row counts") {
    const SplitIndices a = split(140298, 0.8, 1);
    CHECK(a.train.size() == 112238);
    CHECK(a.test.size() == 28060);

    const SplitIndices b = split(29143, 0.8, 1);
    CHECK(b.train.size() == 23314);
    CHECK(b.test.size() == 5829);
}

TEST_CASE("split is deterministic and partitions the index range") {
    const SplitIndices a = split(101, 0.8, 42);
    const SplitIndices b = split(101, 0.8, 42);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);

    for (std::size_t n : {2ul, 3ul, 17ul, 100ul}) {
        const SplitIndices s = split(n, 0.7, 9);
        std::set<std::size_t> seen(s.train.begin(), s.train.end());
        seen.insert(s.test.begin(), s.test.end());
        CHECK(seen.size() == n);
        CHECK(*seen.rbegin() == n - 1);
        CHECK(s.train.size() == static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(n))));
    }

    CHECK_THROWS_AS(split(1, 0.8, 0), DataError);
    CHECK_THROWS_AS(split(10, 1.0, 0), ConfigError);
}
