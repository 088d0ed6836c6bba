#include "lipfit/viscosity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "lipfit/error.hpp"

namespace lipfit {

namespace {

NodeMask neighbourhood(const Grid& g, const NodeMask& set) {
  NodeMask out = set;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (set[v])
      for (const auto& nb : g.neighbors(v)) out[nb.node] = 1;
  return out;
}

NodeMask boundary_subset(const Grid& g, const NodeMask& set) {
  NodeMask out(g.node_count(), 0);
  for (NodeId b : g.boundary_nodes())
    if (set[b]) out[b] = 1;
  return out;
}

RegionReport finish(const Grid& g, RegionReport r) {
  r.a_plus = neighbourhood(g, r.omega_plus);
  r.a_minus = neighbourhood(g, r.omega_minus);
  r.boundary_plus = boundary_subset(g, r.omega_plus);
  r.boundary_minus = boundary_subset(g, r.omega_minus);
  return r;
}

// Region nodes kept for residual statistics: away from the complement of
// the region, from apexes (local extrema of the cone orientation) and from
// the ridge mask.
NodeMask evaluable(const ScalarField& u, const NodeMask& region, int sign, const ResidualOptions& opt) {
  const Grid& g = u.grid();
  const std::size_t n = g.node_count();
  NodeMask outside(n, 0), apex(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!region[v]) {
      outside[v] = 1;
      continue;
    }
    // no neighbour beyond u(v) in the cone direction, at least one strictly
    // behind it; flat patches are not apexes
    bool extreme = true, strict = false;
    for (const auto& nb : g.neighbors(v)) {
      const double d = sign * (u[nb.node] - u[v]);
      if (d > 0) {
        extreme = false;
        break;
      }
      strict |= d < 0;
    }
    apex[v] = extreme && strict ? 1 : 0;
  }
  NodeMask drop = dilate(g, outside, opt.collar);
  const NodeMask near_apex = dilate(g, apex, opt.collar);
  for (std::size_t v = 0; v < n; ++v) drop[v] |= near_apex[v];
  if (opt.ridge) {
    if (opt.ridge->size() != n) fail(ErrorCode::GridMismatch, "ridge mask size does not match the grid");
    const NodeMask near_ridge = dilate(g, *opt.ridge, opt.collar);
    for (std::size_t v = 0; v < n; ++v) drop[v] |= near_ridge[v];
  }
  NodeMask keep(n, 0);
  for (std::size_t v = 0; v < n; ++v) keep[v] = region[v] && !drop[v];
  return keep;
}

template <class Eval>
RegionResidual region_residual(const ScalarField& u, const RegionReport& report, const ResidualOptions& opt,
                               Eval eval) {
  const Grid& g = u.grid();
  const std::size_t n = g.node_count();
  if (report.omega_plus.size() != n || report.omega_minus.size() != n)
    fail(ErrorCode::GridMismatch, "region report does not match the grid");
  RegionResidual out;
  out.value.assign(n, 0.0);
  out.counted.assign(n, 0);
  for (int sign : {+1, -1}) {
    const NodeMask& region = sign > 0 ? report.omega_plus : report.omega_minus;
    ResidualStats& stats = sign > 0 ? out.plus : out.minus;
    // Omega+ is a max of downward cones: an apex is a local max of u.
    const NodeMask keep = evaluable(u, region, sign > 0 ? 1 : -1, opt);
    double sum = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (!region[v]) continue;
      if (!keep[v]) {
        ++stats.excluded;
        continue;
      }
      const double r = eval(v, sign);
      out.value[v] = r;
      out.counted[v] = 1;
      stats.max = std::max(stats.max, r);
      sum += r;
      ++stats.count;
    }
    stats.mean = stats.count ? sum / static_cast<double>(stats.count) : 0.0;
  }
  return out;
}

}  // namespace

std::size_t count(const NodeMask& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)); }

double default_tau(const Grid& g) { return std::max(1e-6, g.max_spacing()); }

RegionReport regions(const ScalarField& u, const ScalarField& f, double tau) {
  require_same_grid(u, f);
  if (!(tau >= 0)) fail(ErrorCode::InvalidArgument, "tau must be >= 0");
  const std::size_t n = u.size();
  RegionReport r;
  r.tau = tau;
  r.omega_plus.assign(n, 0);
  r.omega_minus.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const double d = u[v] - f[v];
    r.omega_plus[v] = d > tau;
    r.omega_minus[v] = d < -tau;
  }
  return finish(u.grid(), std::move(r));
}

RegionReport forced_regions(const Grid& g, NodeMask omega_plus, NodeMask omega_minus) {
  const std::size_t n = g.node_count();
  if (omega_plus.size() != n || omega_minus.size() != n)
    fail(ErrorCode::GridMismatch, "region masks do not match the grid");
  for (std::size_t v = 0; v < n; ++v)
    if (omega_plus[v] && omega_minus[v]) fail(ErrorCode::InvalidArgument, "regions overlap");
  RegionReport r;
  r.omega_plus = std::move(omega_plus);
  r.omega_minus = std::move(omega_minus);
  return finish(g, std::move(r));
}

NodeMask relative_boundary(const Grid& g, const NodeMask& set) {
  NodeMask out(g.node_count(), 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (!set[v]) continue;
    for (const auto& nb : g.neighbors(v))
      if (!set[nb.node]) {
        out[v] = 1;
        break;
      }
  }
  return out;
}

NodeMask dilate(const Grid& g, const NodeMask& seeds, int hops) {
  NodeMask out = seeds;
  std::vector<int> depth(g.node_count(), -1);
  std::deque<NodeId> queue;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (seeds[v]) {
      depth[v] = 0;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (depth[v] >= hops) continue;
    for (const auto& nb : g.neighbors(v))
      if (depth[nb.node] < 0) {
        depth[nb.node] = depth[v] + 1;
        out[nb.node] = 1;
        queue.push_back(nb.node);
      }
  }
  return out;
}

double upwind_gradient(const ScalarField& u, NodeId x, double sign) {
  const Grid& g = u.grid();
  const auto pos = g.lattice_position(x);
  double sum = 0.0;
  for (int d = 0; d < g.dim(); ++d) {
    const double h = g.spacing(d);
    const long lo = d == 0 ? g.node_at(pos[0] - 1, pos[1]) : g.node_at(pos[0], pos[1] - 1);
    const long hi = d == 0 ? g.node_at(pos[0] + 1, pos[1]) : g.node_at(pos[0], pos[1] + 1);
    double term = 0.0;
    if (lo >= 0) term = std::max(term, sign * (u[x] - u[static_cast<NodeId>(lo)]) / h);
    if (hi >= 0) term = std::max(term, -sign * (u[static_cast<NodeId>(hi)] - u[x]) / h);
    sum += term * term;
  }
  return std::sqrt(sum);
}

double normal_derivative(const ScalarField& u, NodeId x) {
  const Grid& g = u.grid();
  const Point nu = g.normal(x);
  const Point px = g.coord(x);
  double best = -2.0, value = 0.0;
  for (const auto& nb : g.neighbors(x)) {
    const Point py = g.coord(nb.node);
    const double align = -((py.x - px.x) * nu.x + (py.y - px.y) * nu.y) / nb.length;
    if (align > best) {
      best = align;
      value = (u[x] - u[nb.node]) / nb.length;
    }
  }
  return value;
}

RegionResidual eikonal_residual(const ScalarField& u, const RegionReport& report, const ResidualOptions& options) {
  return region_residual(u, report, options, [&](NodeId v, int sign) {
    return std::abs(upwind_gradient(u, v, sign > 0 ? -1.0 : 1.0) - 1.0);
  });
}

ScalarField infinity_laplacian(const ScalarField& u, bool normalized) {
  const Grid& g = u.grid();
  const double h = g.min_spacing();
  std::vector<double> out(g.node_count(), 0.0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.is_boundary(v)) continue;
    double hi = -INFINITY, lo = INFINITY;
    for (const auto& nb : g.neighbors(v)) {
      const double s = (u[nb.node] - u[v]) / nb.length;
      hi = std::max(hi, s);
      lo = std::min(lo, s);
    }
    double value = (hi + lo) / h;
    if (!normalized) value *= 0.25 * (hi - lo) * (hi - lo);
    out[v] = value;
  }
  return ScalarField(u.grid_ptr(), std::move(out));
}

RegionResidual combined_residual(const ScalarField& u, const RegionReport& report, const ResidualOptions& options) {
  const ScalarField lap = infinity_laplacian(u, false);
  return region_residual(u, report, options, [&](NodeId v, int sign) {
    const double grad = upwind_gradient(u, v, sign > 0 ? -1.0 : 1.0);
    if (sign > 0) return std::abs(std::max(1.0 - grad, -lap[v]));
    return std::abs(std::min(grad - 1.0, -lap[v]));
  });
}

bool BoundaryCheck::pass() const {
  return violations[0] + violations[1] + violations[2] + violations[3] == 0;
}

BoundaryCheck boundary_condition_check(const ScalarField& u, const RegionReport& report, double slack) {
  const Grid& g = u.grid();
  if (report.boundary_plus.size() != g.node_count() || report.boundary_minus.size() != g.node_count())
    fail(ErrorCode::GridMismatch, "region report does not match the grid");
  BoundaryCheck out;
  out.slack = slack > 0 ? slack : 3.0 * g.max_spacing();
  const double s = out.slack;
  for (NodeId b : g.boundary_nodes()) {
    const int side = report.boundary_plus[b] ? 1 : report.boundary_minus[b] ? -1 : 0;
    if (side == 0) continue;
    BoundaryRow row{b, side, upwind_gradient(u, b, side > 0 ? -1.0 : 1.0), normal_derivative(u, b), true, true};
    if (side > 0) {
      row.first_ok = 1.0 - row.gradient <= s;
      row.second_ok = std::max(1.0 - row.gradient, row.normal_derivative) >= -s;
    } else {
      row.first_ok = row.gradient - 1.0 >= -s;
      row.second_ok = std::min(row.gradient - 1.0, row.normal_derivative) <= s;
    }
    const int base = side > 0 ? 0 : 2;
    if (!row.first_ok) ++out.violations[base];
    if (!row.second_ok) ++out.violations[base + 1];
    out.rows.push_back(row);
  }
  return out;
}

SlopeCheck double_inequality_check(const ScalarField& u, double tol) {
  SlopeCheck out;
  for (const auto& e : u.grid().edges())
    out.max_slope = std::max(out.max_slope, std::abs(u[e.a] - u[e.b]) / e.length);
  out.pass = out.max_slope <= 1.0 + tol;
  return out;
}

nlohmann::json to_json(const RegionReport& r, const Grid& g) {
  auto describe = [&](const NodeMask& m) {
    nlohmann::json j;
    j["count"] = count(m);
    nlohmann::json lo = nullptr, hi = nullptr;
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (NodeId v = 0; v < m.size(); ++v)
      if (m[v]) {
        const Point p = g.coord(v);
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
      }
    if (count(m) > 0) {
      if (g.dim() == 1) {
        lo = xlo;
        hi = xhi;
      } else {
        lo = {xlo, ylo};
        hi = {xhi, yhi};
      }
    }
    j["lo"] = lo;
    j["hi"] = hi;
    j["nodes"] = m;
    return j;
  };
  return {{"tau", r.tau},
          {"omega_plus", describe(r.omega_plus)},
          {"omega_minus", describe(r.omega_minus)},
          {"a_plus", describe(r.a_plus)},
          {"a_minus", describe(r.a_minus)},
          {"boundary_plus", describe(r.boundary_plus)},
          {"boundary_minus", describe(r.boundary_minus)}};
}

nlohmann::json to_json(const ResidualStats& s) {
  return {{"max", s.max}, {"mean", s.mean}, {"count", s.count}, {"excluded", s.excluded}};
}

nlohmann::json to_json(const BoundaryCheck& b, const Grid& g) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : b.rows) {
    const Point p = g.coord(r.node);
    nlohmann::json at = g.dim() == 1 ? nlohmann::json(p.x) : nlohmann::json{p.x, p.y};
    rows.push_back({{"node", r.node},
                    {"at", at},
                    {"side", r.side > 0 ? "+" : "-"},
                    {"gradient", r.gradient},
                    {"normal_derivative", r.normal_derivative},
                    {"first_ok", r.first_ok},
                    {"second_ok", r.second_ok}});
  }
  return {{"slack", b.slack},
          {"pass", b.pass()},
          {"violations",
           {{"plus_gradient", b.violations[0]},
            {"plus_max", b.violations[1]},
            {"minus_gradient", b.violations[2]},
            {"minus_min", b.violations[3]}}},
          {"rows", rows}};
}

}  // namespace lipfit
