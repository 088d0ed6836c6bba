#pragma once

#include <json.hpp>

#include "lipfit/grid.hpp"

namespace lipfit {

struct ProjectOptions {
  double tol_feas = 0.0;  // 0: 1e-8 * longest edge
  double tol_inc = 0.0;   // 0: 1e-9 * max(1, ||f||_2)
  long max_iter = 200000;
};

// Convergence and optimality report for a projection.
struct Certificate {
  long iterations = 0;
  double feas = 0.0;   // max edge violation (|u_i - u_j| - l_ij)_+
  double inc = 0.0;    // quadrature L2 change over the last sweep
  double kkt = 0.0;    // unexplained stationarity residual, W^-1 norm
  double slack = 0.0;  // worst multiplier * (l_ij - |u_i - u_j|)
  bool converged = true;
};

struct Projection {
  ScalarField u;
  Certificate certificate;
};

// Quadrature-weighted L2 projection onto {|v_i - v_j| <= l_ij on every edge}
// by Dykstra's cyclic corrections. Never throws on slow convergence: the last
// iterate is returned with certificate.converged = false.
Projection project_lip_graph(const ScalarField& f, const ProjectOptions& options = {});

double max_edge_violation(const ScalarField& u);

// Best nonnegative multipliers on the active edges of u (|u_i - u_j| within
// tolerance of l_ij), fitted to W(u - f) by projected gradient from a
// spanning-forest start. Fills kkt, slack and feas.
Certificate kkt_residual(const ScalarField& u, const ScalarField& f, double tol_feas = 1e-8);

nlohmann::json to_json(const Certificate& c);

// Datum clamped into [-delta, delta], delta the distance to the boundary.
ScalarField dirichlet_datum(const ScalarField& f);

struct DirichletProjection {
  ScalarField datum;
  ScalarField u;
  Certificate certificate;
  double boundary_trace = 0.0;  // max |u| over boundary nodes
};

// Zero-trace projection: the free projection of dirichlet_datum(f).
DirichletProjection project_lip_dirichlet(const ScalarField& f, const ProjectOptions& options = {});

}  // namespace lipfit
