#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "lipfit/grid.hpp"

namespace lipfit {

using NodeMask = std::vector<std::uint8_t>;

// Contact regions of u against f, one flag per node.
struct RegionReport {
  double tau = 0.0;
  NodeMask omega_plus;      // u - f > tau
  NodeMask omega_minus;     // u - f < -tau
  NodeMask a_plus;          // omega_plus and its graph neighbours
  NodeMask a_minus;
  NodeMask boundary_plus;   // domain boundary nodes in omega_plus
  NodeMask boundary_minus;
};

std::size_t count(const NodeMask& m);

// max(1e-6, h)
double default_tau(const Grid& g);

RegionReport regions(const ScalarField& u, const ScalarField& f, double tau);

// Report with prescribed Omega sets, for residual checks of fields that do
// not come from a datum.
RegionReport forced_regions(const Grid& g, NodeMask omega_plus, NodeMask omega_minus);

// Nodes of `set` with a neighbour outside it.
NodeMask relative_boundary(const Grid& g, const NodeMask& set);

// Nodes within `hops` graph steps of a seed node.
NodeMask dilate(const Grid& g, const NodeMask& seeds, int hops);

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;     // nodes that entered the statistics
  std::size_t excluded = 0;  // region nodes dropped by collar/apex/ridge
};

struct ResidualOptions {
  int collar = 2;
  const NodeMask* ridge = nullptr;  // extra nodes to exclude (with collar)
};

struct RegionResidual {
  ResidualStats plus;
  ResidualStats minus;
  std::vector<double> value;  // per node, 0 where not evaluated
  NodeMask counted;
};

// |grad(sign * u)| by the Rouy-Tourin upwind formula on the axis neighbours
// that exist.
double upwind_gradient(const ScalarField& u, NodeId x, double sign);

// Outward normal derivative from the interior neighbour best aligned with -nu.
double normal_derivative(const ScalarField& u, NodeId x);

// | |grad u| - 1 | with the upwind gradient of u in Omega-, of -u in Omega+,
// away from region collars and apexes.
RegionResidual eikonal_residual(const ScalarField& u, const RegionReport& report,
                                const ResidualOptions& options = {});

// (1/h) [max_y slope_y + min_y slope_y] with slope_y = (u(y) - u(x)) / l_xy,
// the normalised infinity-Laplacian. With normalized = false it is scaled
// by the squared gradient (max slope - min slope)^2 / 4.
ScalarField infinity_laplacian(const ScalarField& u, bool normalized = true);

// |max{1 - |grad u|, -Lap_inf u}| in Omega+, |min{|grad u| - 1, -Lap_inf u}|
// in Omega-, same exclusions as the eikonal residual.
RegionResidual combined_residual(const ScalarField& u, const RegionReport& report,
                                 const ResidualOptions& options = {});

struct BoundaryRow {
  NodeId node;
  int side;  // +1 or -1
  double gradient;
  double normal_derivative;
  bool first_ok;
  bool second_ok;
};

struct BoundaryCheck {
  double slack = 0.0;
  std::vector<BoundaryRow> rows;
  std::size_t violations[4] = {0, 0, 0, 0};  // (+,1) (+,2) (-,1) (-,2)
  bool pass() const;
};

// On (dOmega)+: 1 - |grad u| <= s and max{1 - |grad u|, du/dnu} >= -s.
// On (dOmega)-: |grad u| - 1 >= -s and min{|grad u| - 1, du/dnu} <= s.
// slack <= 0 selects 3h.
BoundaryCheck boundary_condition_check(const ScalarField& u, const RegionReport& report, double slack = 0.0);

struct SlopeCheck {
  double max_slope = 0.0;
  bool pass = true;
};

// Both 1 - |grad u| >= 0 and |grad u| - 1 <= 0: every graph slope
// |u(y) - u(x)| / l_xy is at most 1 + tol.
SlopeCheck double_inequality_check(const ScalarField& u, double tol = 1e-8);

nlohmann::json to_json(const RegionReport& r, const Grid& g);
nlohmann::json to_json(const ResidualStats& s);
nlohmann::json to_json(const BoundaryCheck& b, const Grid& g);

}  // namespace lipfit
