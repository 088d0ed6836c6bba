#pragma once

#include "lipfit/grid.hpp"

namespace lipfit {

// Smallest graph-1-Lipschitz majorant: max_y [f(y) - d(x, y)].
ScalarField upper_envelope(const ScalarField& f);

// Largest graph-1-Lipschitz minorant: min_y [f(y) + d(x, y)].
ScalarField lower_envelope(const ScalarField& f);

struct ConeCheck {
  double max_error = 0.0;
  std::size_t region_size = 0;    // nodes of A+ (or A-)
  std::size_t boundary_size = 0;  // nodes of its relative boundary
};

// sign > 0: max over x in A+ of |u(x) - max_{y in dA+} [u(y) - d(x, y)]|.
// sign < 0: the same for A- with min_y [u(y) + d(x, y)].
// Regions use threshold tau; u must be feasible within tol_feas.
ConeCheck cone_representation_error(const ScalarField& u, const ScalarField& f, int sign, double tau,
                                    double tol_feas = 1e-8);

}  // namespace lipfit
