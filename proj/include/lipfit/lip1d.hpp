#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lipfit/grid.hpp"

namespace lipfit {

// Per-node fidelity: Squared is w/2 (v-f)^2, Absolute is w |v-f|.
enum class Fidelity { Absolute = 1, Squared = 2 };

Fidelity fidelity_for_exponent(int r);

struct PathFit {
  std::vector<double> values;
  double objective = 0.0;
};

// Exact minimiser of sum_i fidelity_i(v_i) subject to
// |v_{i+1} - v_i| <= link_bounds[i], by forward dynamic programming over
// convex piecewise-quadratic value functions and backtracking.
// weights.size() == data.size(), link_bounds.size() == data.size() - 1.
PathFit fit_lipschitz_path(std::span<const double> data, std::span<const double> weights,
                           std::span<const double> link_bounds, Fidelity fidelity = Fidelity::Squared);

// Optimal objective of the sub-path [start, j] for every j in [start, end).
// One forward pass; entry k is the cost of [start, start + k].
std::vector<double> path_prefix_costs(std::span<const double> data, std::span<const double> weights,
                                      std::span<const double> link_bounds, std::size_t start,
                                      std::size_t end, Fidelity fidelity);

// Quadrature-weighted projection of a 1D field onto |v'| <= lipschitz.
ScalarField project_lip_1d(const ScalarField& f, double lipschitz = 1.0);

// min over 1-Lipschitz v on nodes i..j of (1/r) sum w |v - f|^r.
double segment_cost(const ScalarField& f, std::size_t i, std::size_t j, int r);

// Minimiser on nodes i..j for the same problem.
std::vector<double> segment_fit(const ScalarField& f, std::size_t i, std::size_t j, int r);

// segment_cost(f, i, j, r) for all j >= i.
std::vector<double> segment_costs_from(const ScalarField& f, std::size_t i, int r);

// Objective of the 1D projection problem, sum w/2 (v - f)^2.
double fidelity_energy(const ScalarField& v, const ScalarField& f);

}  // namespace lipfit
