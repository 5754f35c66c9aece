#include "ofsulr/classifier.hpp"

#include "ofsulr/error.hpp"
#include "ofsulr/linear_models.hpp"
#include "ofsulr/tree_models.hpp"

namespace ofsulr {

std::unique_ptr<Classifier> makeClassifier(const std::string& kind) {
    if (kind == "logreg") return std::make_unique<LogRegClassifier>();
    if (kind == "svm") return std::make_unique<SvmClassifier>();
    if (kind == "tree") return std::make_unique<TreeClassifier>();
    if (kind == "forest") return std::make_unique<ForestClassifier>();
    if (kind == "gbt") return std::make_unique<GbtClassifier>();
    throw DataError("unknown classifier kind: " + kind);
}

}  // namespace ofsulr
