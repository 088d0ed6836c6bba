#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "lipfit/grid.hpp"

namespace lipfit {

// Minimiser of (1/r) sum w |v - f|^r + penalty * #jumps over functions that
// are 1-Lipschitz between jumps. Jumps sit on bonds: bond b joins nodes b
// and b + 1.
struct JumpSolution {
  std::vector<std::size_t> jumps;  // bond indices, increasing
  std::vector<double> jump_x;      // bond midpoints
  ScalarField v;
  double energy = 0.0;
  double fidelity = 0.0;
  double jump_part = 0.0;
  int r = 2;
  double penalty = 1.0;
  std::size_t njumps() const { return jumps.size(); }
};

JumpSolution minimize_sbv_1d(const ScalarField& f, int r, double penalty = 1.0);

struct SbvEnergy {
  double energy = 0.0;
  double fidelity = 0.0;
  double jump_part = 0.0;
  // Upper bound on the finite-p functional of the same candidate:
  // energy + |Omega| / p, since |v'| <= 1 off the jumps.
  double finite_p_bound(double p, double measure) const { return energy + measure / p; }
};

// Energy of a candidate given node values and its jump bonds. Every bond
// not in `jumps` must satisfy |v_{b+1} - v_b| <= link_bounds[b].
SbvEnergy sbv_energy(std::span<const double> v, std::span<const double> f, std::span<const double> weights,
                     std::span<const double> link_bounds, std::span<const std::size_t> jumps, int r,
                     double penalty);
SbvEnergy sbv_energy(const ScalarField& v, std::span<const std::size_t> jumps, const ScalarField& f, int r,
                     double penalty);

nlohmann::json to_json(const JumpSolution& s);

// Radial 1-Lipschitz fit of a radial datum on the disk of radius R, by the
// path DP in rho with quadrature weights 2 pi rho.
struct RadialProfile {
  std::vector<double> rho;
  std::vector<double> values;
  double energy = 0.0;  // 1/2 int (v - f)^2 over the disk
  double at(double rho) const;
};

RadialProfile radial_projection(const std::function<double(double)>& f, double radius, int n);

// f = k on the disk of radius r inside the disk of radius R: perimeter cost
// 2 pi r of keeping the jump against the best continuous fit.
struct RadialComparison {
  double jump_energy = 0.0;
  double continuous_energy = 0.0;
  bool jump_preferred() const { return jump_energy < continuous_energy; }
};

RadialComparison radial_jump_comparison(double k, double r, double radius, int n);

}  // namespace lipfit
