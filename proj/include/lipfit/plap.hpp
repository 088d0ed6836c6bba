#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lipfit/grid.hpp"

namespace lipfit {

// (1/p) sum_cells |grad v|^p vol + 1/2 sum_nodes w (v - f)^2.
// Cell gradients are forward differences averaged over the cell's corners;
// cells with an unmasked corner are skipped.
double energy_p(const ScalarField& v, const ScalarField& f, double p);

// (sum_cells |grad v|^p vol)^(1/p)
double cell_gradient_norm(const ScalarField& v, double p);

struct MinimizeOptions {
  double tol = 0.0;  // 0: 1e-8 * (1 + ||f||_2)
  long max_iter = 50000;
  int memory = 8;
  bool record_energy = false;
};

struct PMinimum {
  ScalarField u;
  long iterations = 0;
  double energy = 0.0;
  double grad_norm = 0.0;  // W^-1 norm of the energy gradient
  bool converged = false;
  std::vector<double> energy_trace;
};

// Gradient of energy_p with respect to the nodal values.
std::vector<double> energy_gradient(const ScalarField& v, const ScalarField& f, double p);

// L-BFGS with Armijo backtracking in the quadrature inner product. Throws
// LineSearchStalled when no step above 1e-16 decreases the energy.
PMinimum minimize_p(const ScalarField& f, double p, const MinimizeOptions& options = {},
                    const ScalarField* warm_start = nullptr);

struct PSweepRow {
  double p = 0.0;
  double sup_distance = 0.0;  // ||u_p - reference||_inf
  double linf = 0.0;          // ||u_p||_inf
  double l2 = 0.0;            // ||u_p||_2
  double grad_lp = 0.0;       // cell gradient L^p norm
  double grad_bound = 0.0;    // (p ||f||_2^2)^(1/p)
  double mean_diff = 0.0;     // mean of u_p - f
  double energy = 0.0;
  long iterations = 0;
  bool converged = false;
};

struct PSweepReport {
  double f_l2 = 0.0;
  double f_linf = 0.0;
  double f_l1 = 0.0;
  std::vector<PSweepRow> rows;
  bool converged() const;
};

// Solves for each p in turn, warm-starting from the previous p unless
// cold_start. reference is the projection the sup-distance is taken to.
PSweepReport p_sweep(const ScalarField& f, const std::vector<double>& ps, const ScalarField& reference,
                     const MinimizeOptions& options = {}, bool cold_start = false);

void write_csv(std::ostream& os, const PSweepReport& report, const std::string& provenance = {});

}  // namespace lipfit
