#pragma once

#include <functional>
#include <string>

#include "lipfit/grid.hpp"

namespace lipfit::datasets {

using Rule = std::function<double(Point)>;

// k on the open interval (-r, r), 0 elsewhere.
Rule plateau(double k, double r);
// 2|x|
Rule double_slope();
// sqrt(|x|)
Rule square_root();
// k on the open disk of radius r about the origin, 0 elsewhere.
Rule radial_plateau(double k, double r);

}  // namespace lipfit::datasets
