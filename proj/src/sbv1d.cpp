#include "lipfit/sbv1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lipfit/error.hpp"
#include "lipfit/lip1d.hpp"

namespace lipfit {

namespace {

std::vector<double> unit_bounds(const Grid& g) {
  std::vector<double> b(g.node_count() - 1);
  for (std::size_t i = 0; i + 1 < g.node_count(); ++i)
    b[i] = g.coord(static_cast<NodeId>(i + 1)).x - g.coord(static_cast<NodeId>(i)).x;
  return b;
}

bool better(double value, std::size_t jumps, double best_value, std::size_t best_jumps) {
  const double tie = 1e-12 * (1.0 + std::abs(best_value));
  if (value < best_value - tie) return true;
  if (value > best_value + tie) return false;
  return jumps < best_jumps;
}

}  // namespace

JumpSolution minimize_sbv_1d(const ScalarField& f, int r, double penalty) {
  if (f.grid().dim() != 1) fail(ErrorCode::InvalidArgument, "1D grid required");
  const auto fidelity = fidelity_for_exponent(r);
  if (!(penalty > 0) || !std::isfinite(penalty)) fail(ErrorCode::InvalidArgument, "penalty must be positive");
  const Grid& g = f.grid();
  const std::size_t n = f.size();
  const auto bounds = unit_bounds(g);

  // cost[i][k]: optimal fit of nodes i..i+k
  std::vector<std::vector<double>> cost(n);
  for (std::size_t i = 0; i < n; ++i)
    cost[i] = path_prefix_costs(f.values(), g.weights(), bounds, i, n, fidelity);

  // best[j]: optimum over the first j nodes; a segment starting at i > 0
  // pays for the jump on bond i - 1.
  std::vector<double> best(n + 1, INFINITY);
  std::vector<std::size_t> count(n + 1, 0), start(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double value = best[i] + cost[i][j - 1 - i] + (i > 0 ? penalty : 0.0);
      const std::size_t jumps = count[i] + (i > 0 ? 1 : 0);
      if (i == 0 || better(value, jumps, best[j], count[j])) {
        best[j] = value;
        count[j] = jumps;
        start[j] = i;
      }
    }

  JumpSolution out;
  out.r = r;
  out.penalty = penalty;
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  for (std::size_t j = n; j > 0; j = start[j]) segments.push_back({start[j], j - 1});
  std::reverse(segments.begin(), segments.end());

  std::vector<double> v(n);
  for (const auto& [i, j] : segments) {
    const auto piece = segment_fit(f, i, j, r);
    std::copy(piece.begin(), piece.end(), v.begin() + static_cast<long>(i));
    out.fidelity += cost[i][j - i];
    if (i > 0) {
      out.jumps.push_back(i - 1);
      out.jump_x.push_back(0.5 * (g.coord(static_cast<NodeId>(i - 1)).x + g.coord(static_cast<NodeId>(i)).x));
    }
  }
  out.jump_part = penalty * static_cast<double>(out.jumps.size());
  out.energy = out.fidelity + out.jump_part;
  out.v = ScalarField(f.grid_ptr(), std::move(v));
  return out;
}

SbvEnergy sbv_energy(std::span<const double> v, std::span<const double> f, std::span<const double> weights,
                     std::span<const double> link_bounds, std::span<const std::size_t> jumps, int r,
                     double penalty) {
  const auto fidelity = fidelity_for_exponent(r);
  SbvEnergy out;
  if (v.empty()) return out;
  if (f.size() != v.size() || weights.size() != v.size() || link_bounds.size() + 1 != v.size())
    fail(ErrorCode::InvalidArgument, "inconsistent candidate sizes");
  std::vector<std::uint8_t> cut(link_bounds.size(), 0);
  for (std::size_t b : jumps) {
    if (b >= link_bounds.size()) fail(ErrorCode::IndexOutOfRange, "jump bond outside the grid");
    cut[b] = 1;
  }
  for (std::size_t b = 0; b < link_bounds.size(); ++b)
    if (!cut[b] && std::abs(v[b + 1] - v[b]) > link_bounds[b] * (1.0 + 1e-10) + 1e-12)
      fail(ErrorCode::InfeasibleSegment, "slope above 1 on bond " + std::to_string(b));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::abs(v[i] - f[i]);
    out.fidelity += fidelity == Fidelity::Squared ? 0.5 * weights[i] * d * d : weights[i] * d;
  }
  out.jump_part = penalty * static_cast<double>(std::count(cut.begin(), cut.end(), 1));
  out.energy = out.fidelity + out.jump_part;
  return out;
}

SbvEnergy sbv_energy(const ScalarField& v, std::span<const std::size_t> jumps, const ScalarField& f, int r,
                     double penalty) {
  require_same_grid(v, f);
  if (v.grid().dim() != 1) fail(ErrorCode::InvalidArgument, "1D grid required");
  const auto bounds = unit_bounds(v.grid());
  return sbv_energy(v.values(), f.values(), v.grid().weights(), bounds, jumps, r, penalty);
}

nlohmann::json to_json(const JumpSolution& s) {
  return {{"jumps", s.jump_x},   {"bonds", s.jumps},       {"njumps", s.njumps()}, {"energy", s.energy},
          {"fidelity", s.fidelity}, {"jump_part", s.jump_part}, {"r", s.r},           {"penalty", s.penalty}};
}

double RadialProfile::at(double r) const {
  if (rho.empty()) fail(ErrorCode::InvalidArgument, "empty radial profile");
  if (r <= rho.front()) return values.front();
  if (r >= rho.back()) return values.back();
  const auto it = std::upper_bound(rho.begin(), rho.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - rho.begin());
  const double t = (r - rho[k - 1]) / (rho[k] - rho[k - 1]);
  return (1.0 - t) * values[k - 1] + t * values[k];
}

RadialProfile radial_projection(const std::function<double(double)>& f, double radius, int n) {
  const auto line = Grid::line(0.0, radius, n);
  RadialProfile out;
  std::vector<double> data(line->node_count()), weights(line->node_count());
  for (NodeId i = 0; i < line->node_count(); ++i) {
    const double rho = line->coord(i).x;
    out.rho.push_back(rho);
    data[i] = f(rho);
    if (!std::isfinite(data[i])) fail(ErrorCode::NonFiniteSample, "radial datum is not finite");
    weights[i] = 2.0 * std::numbers::pi * rho * line->weight(i);
  }
  const auto bounds = unit_bounds(*line);
  auto fit = fit_lipschitz_path(data, weights, bounds, Fidelity::Squared);
  out.values = std::move(fit.values);
  out.energy = fit.objective;
  return out;
}

RadialComparison radial_jump_comparison(double k, double r, double radius, int n) {
  if (!(r > 0 && r < radius)) fail(ErrorCode::InvalidArgument, "need 0 < r < R");
  RadialComparison out;
  out.jump_energy = 2.0 * std::numbers::pi * r;
  out.continuous_energy = radial_projection([&](double rho) { return rho < r ? k : 0.0; }, radius, n).energy;
  return out;
}

}  // namespace lipfit
