#include "lipfit/envelope.hpp"

#include <cmath>
#include <limits>

#include "lipfit/error.hpp"
#include "lipfit/metric.hpp"
#include "lipfit/projector.hpp"
#include "lipfit/viscosity.hpp"

namespace lipfit {

ScalarField upper_envelope(const ScalarField& f) {
  std::vector<double> labels(f.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = -f[i];
  return -distance_transform(f.grid_ptr(), labels);
}

ScalarField lower_envelope(const ScalarField& f) { return distance_transform(f.grid_ptr(), f.values()); }

ConeCheck cone_representation_error(const ScalarField& u, const ScalarField& f, int sign, double tau,
                                    double tol_feas) {
  require_same_grid(u, f);
  if (sign == 0) fail(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  const double violation = max_edge_violation(u);
  if (violation > tol_feas)
    fail(ErrorCode::InfeasibleInput, "u violates the Lipschitz bound by " + std::to_string(violation));

  const auto report = regions(u, f, tau);
  const NodeMask& a = sign > 0 ? report.a_plus : report.a_minus;
  const NodeMask edge = relative_boundary(u.grid(), a);
  ConeCheck out;
  out.region_size = count(a);
  out.boundary_size = count(edge);
  if (out.region_size == 0 || out.boundary_size == 0) return out;

  // max_y [u(y) - d] = -min_y [-u(y) + d]
  const double s = sign > 0 ? -1.0 : 1.0;
  std::vector<double> labels(u.size(), std::numeric_limits<double>::infinity());
  for (NodeId v = 0; v < u.size(); ++v)
    if (edge[v]) labels[v] = s * u[v];
  const ScalarField cone = distance_transform(u.grid_ptr(), labels);
  for (NodeId v = 0; v < u.size(); ++v)
    if (a[v]) out.max_error = std::max(out.max_error, std::abs(u[v] - s * cone[v]));
  return out;
}

}  // namespace lipfit
