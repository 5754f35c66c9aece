#include "ofsulr/matrix.hpp"

#include <cmath>

namespace ofsulr {

bool Matrix::allFinite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace ofsulr
