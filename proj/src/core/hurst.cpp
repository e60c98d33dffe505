#include "fracnelson/core/hurst.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracnelson::core {

HurstIndex::HurstIndex(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw std::invalid_argument("Hurst index must lie in (0, 1), got " + std::to_string(value));
  }
}

}  // namespace fracnelson::core
