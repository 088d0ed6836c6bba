#include "lipfit/datasets.hpp"

#include <cmath>

namespace lipfit::datasets {

Rule plateau(double k, double r) {
  return [k, r](Point p) { return std::abs(p.x) < r ? k : 0.0; };
}

Rule double_slope() {
  return [](Point p) { return 2.0 * std::abs(p.x); };
}

Rule square_root() {
  return [](Point p) { return std::sqrt(std::abs(p.x)); };
}

Rule radial_plateau(double k, double r) {
  return [k, r](Point p) { return std::hypot(p.x, p.y) < r ? k : 0.0; };
}

}  // namespace lipfit::datasets
