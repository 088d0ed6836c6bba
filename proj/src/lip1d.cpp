#include "lipfit/lip1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipfit/error.hpp"
#include "lipfit/piecewise_quadratic.hpp"

namespace lipfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_fidelity(PiecewiseQuadratic& v, double weight, double datum, Fidelity fidelity) {
  if (weight == 0.0) return;
  if (fidelity == Fidelity::Squared)
    v.add_quadratic(weight, datum);
  else
    v.add_absolute(weight, datum);
}

void check_path_inputs(std::span<const double> data, std::span<const double> weights,
                       std::span<const double> link_bounds) {
  if (weights.size() != data.size())
    fail(ErrorCode::InvalidArgument, "one weight per node required");
  if (!data.empty() && link_bounds.size() + 1 != data.size())
    fail(ErrorCode::InvalidArgument, "one bound per link required");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "weights must be finite and >= 0");
  for (double c : link_bounds)
    if (!(c >= 0) || !std::isfinite(c)) fail(ErrorCode::InvalidArgument, "link bounds must be finite and >= 0");
}

double pick_point(double lo, double hi) {
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo;
  if (std::isfinite(hi)) return hi;
  return 0.0;
}

double objective_of(std::span<const double> v, std::span<const double> data,
                    std::span<const double> weights, Fidelity fidelity) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = v[i] - data[i];
    s += fidelity == Fidelity::Squared ? 0.5 * weights[i] * r * r : weights[i] * std::abs(r);
  }
  return s;
}

std::vector<double> grid_link_bounds(const Grid& g, double lipschitz) {
  std::vector<double> bounds(g.node_count() - 1);
  for (std::size_t i = 0; i + 1 < g.node_count(); ++i)
    bounds[i] = lipschitz * (g.coord(static_cast<NodeId>(i + 1)).x - g.coord(static_cast<NodeId>(i)).x);
  return bounds;
}

void require_1d(const ScalarField& f) {
  if (f.grid().dim() != 1) fail(ErrorCode::InvalidArgument, "1D grid required");
}

}  // namespace

Fidelity fidelity_for_exponent(int r) {
  if (r == 1) return Fidelity::Absolute;
  if (r == 2) return Fidelity::Squared;
  fail(ErrorCode::UnsupportedExponent, "exponent must be 1 or 2, got " + std::to_string(r));
}

PathFit fit_lipschitz_path(std::span<const double> data, std::span<const double> weights,
                           std::span<const double> link_bounds, Fidelity fidelity) {
  check_path_inputs(data, weights, link_bounds);
  const std::size_t n = data.size();
  if (n == 0) return {};
  if (n == 1) return {{data[0]}, 0.0};
  bool feasible = true;
  for (std::size_t i = 0; i + 1 < n && feasible; ++i) feasible = std::abs(data[i + 1] - data[i]) <= link_bounds[i];
  if (feasible) return {{data.begin(), data.end()}, 0.0};

  // Argmin interval of every forward value function, for backtracking.
  std::vector<double> arg_lo(n), arg_hi(n);
  PiecewiseQuadratic value;
  add_fidelity(value, weights[0], data[0], fidelity);
  for (std::size_t i = 0;; ++i) {
    const auto m = value.minimum();
    arg_lo[i] = m.lo;
    arg_hi[i] = m.hi;
    if (i + 1 == n) break;
    value.inf_convolve_box(link_bounds[i]);
    add_fidelity(value, weights[i + 1], data[i + 1], fidelity);
  }
  value.check_invariants();

  std::vector<double> v(n);
  v[n - 1] = pick_point(arg_lo[n - 1], arg_hi[n - 1]);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double next = v[i + 1];
    const double c = link_bounds[i];
    v[i] = std::clamp(std::clamp(next, arg_lo[i], arg_hi[i]), next - c, next + c);
  }
  const double objective = objective_of(v, data, weights, fidelity);
  return {std::move(v), objective};
}

std::vector<double> path_prefix_costs(std::span<const double> data, std::span<const double> weights,
                                      std::span<const double> link_bounds, std::size_t start,
                                      std::size_t end, Fidelity fidelity) {
  check_path_inputs(data, weights, link_bounds);
  if (start >= end || end > data.size())
    fail(ErrorCode::IndexOutOfRange, "bad sub-path range");
  std::vector<double> costs;
  costs.reserve(end - start);
  PiecewiseQuadratic value;
  add_fidelity(value, weights[start], data[start], fidelity);
  for (std::size_t j = start;; ++j) {
    costs.push_back(std::max(0.0, value.minimum().value));
    if (j + 1 == end) break;
    value.inf_convolve_box(link_bounds[j]);
    add_fidelity(value, weights[j + 1], data[j + 1], fidelity);
  }
  value.check_invariants();
  return costs;
}

ScalarField project_lip_1d(const ScalarField& f, double lipschitz) {
  require_1d(f);
  if (!(lipschitz > 0)) fail(ErrorCode::InvalidArgument, "Lipschitz bound must be positive");
  const Grid& g = f.grid();
  const auto bounds = grid_link_bounds(g, lipschitz);
  auto fit = fit_lipschitz_path(f.values(), g.weights(), bounds, Fidelity::Squared);
  return ScalarField(f.grid_ptr(), std::move(fit.values));
}

double segment_cost(const ScalarField& f, std::size_t i, std::size_t j, int r) {
  require_1d(f);
  const auto fidelity = fidelity_for_exponent(r);
  if (i > j || j >= f.size()) fail(ErrorCode::IndexOutOfRange, "segment [i, j] outside the grid");
  const auto bounds = grid_link_bounds(f.grid(), 1.0);
  return path_prefix_costs(f.values(), f.grid().weights(), bounds, i, j + 1, fidelity).back();
}

std::vector<double> segment_fit(const ScalarField& f, std::size_t i, std::size_t j, int r) {
  require_1d(f);
  const auto fidelity = fidelity_for_exponent(r);
  if (i > j || j >= f.size()) fail(ErrorCode::IndexOutOfRange, "segment [i, j] outside the grid");
  const auto bounds = grid_link_bounds(f.grid(), 1.0);
  const auto len = j - i + 1;
  return fit_lipschitz_path(f.values().subspan(i, len),
                            std::span<const double>(f.grid().weights()).subspan(i, len),
                            std::span<const double>(bounds).subspan(i, len - 1), fidelity)
      .values;
}

std::vector<double> segment_costs_from(const ScalarField& f, std::size_t i, int r) {
  require_1d(f);
  const auto fidelity = fidelity_for_exponent(r);
  if (i >= f.size()) fail(ErrorCode::IndexOutOfRange, "segment start outside the grid");
  const auto bounds = grid_link_bounds(f.grid(), 1.0);
  return path_prefix_costs(f.values(), f.grid().weights(), bounds, i, f.size(), fidelity);
}

double fidelity_energy(const ScalarField& v, const ScalarField& f) {
  require_same_grid(v, f);
  return objective_of(v.values(), f.values(), f.grid().weights(), Fidelity::Squared);
}

}  // namespace lipfit
