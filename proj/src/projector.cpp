#include "lipfit/projector.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lipfit/error.hpp"
#include "lipfit/metric.hpp"

namespace lipfit {

namespace {

double longest_edge(const Grid& g) {
  double m = 0.0;
  for (const auto& e : g.edges()) m = std::max(m, e.length);
  return m;
}

double weighted_norm(std::span<const double> v, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace

double max_edge_violation(const ScalarField& u) {
  double worst = 0.0;
  for (const auto& e : u.grid().edges())
    worst = std::max(worst, std::abs(u[e.a] - u[e.b]) - e.length);
  return worst;
}

Projection project_lip_graph(const ScalarField& f, const ProjectOptions& options) {
  const Grid& g = f.grid();
  const auto& w = g.weights();
  const double tol_feas = options.tol_feas > 0 ? options.tol_feas : 1e-8 * longest_edge(g);
  const double tol_inc =
      options.tol_inc > 0 ? options.tol_inc : 1e-9 * std::max(1.0, weighted_norm(f.values(), w));
  if (options.max_iter < 0) fail(ErrorCode::InvalidArgument, "max_iter must be >= 0");

  // Data already inside the stopping tolerance are their own projection;
  // this also makes re-projection of a result exact.
  Projection out{f, {}};
  const double initial = max_edge_violation(f);
  if (initial <= tol_feas) {
    out.certificate.feas = std::max(0.0, initial);
    return out;
  }

  // Edge slabs in (min id, max id) order. In the W inner product the
  // projection onto |x_a - x_b| <= l moves x_a and x_b by w_b/(w_a+w_b) and
  // w_a/(w_a+w_b) of the excess; the Dykstra memory of each slab is a
  // multiple s of that direction.
  struct Slab {
    NodeId a, b;
    double len, ca, cb;
  };
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  std::sort(edges.begin(), edges.end(),
            [](const Edge& p, const Edge& q) { return p.a != q.a ? p.a < q.a : p.b < q.b; });
  std::vector<Slab> slabs;
  slabs.reserve(edges.size());
  for (const auto& e : edges) {
    const double sum = w[e.a] + w[e.b];
    slabs.push_back({e.a, e.b, e.length, w[e.b] / sum, w[e.a] / sum});
  }
  std::vector<double> memory(slabs.size(), 0.0);
  std::vector<double> x(f.values().begin(), f.values().end());
  std::vector<double> previous(x.size());

  auto& cert = out.certificate;
  cert.converged = false;
  for (long it = 1; it <= options.max_iter; ++it) {
    previous = x;
    for (std::size_t k = 0; k < slabs.size(); ++k) {
      const Slab& sl = slabs[k];
      const double s = memory[k];
      const double ya = x[sl.a] + s * sl.ca;
      const double yb = x[sl.b] - s * sl.cb;
      const double d = ya - yb;
      const double excess = d - std::clamp(d, -sl.len, sl.len);
      x[sl.a] = ya - excess * sl.ca;
      x[sl.b] = yb + excess * sl.cb;
      memory[k] = excess;
    }
    double inc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) inc += w[i] * (x[i] - previous[i]) * (x[i] - previous[i]);
    cert.iterations = it;
    cert.inc = std::sqrt(inc);
    if (cert.inc > tol_inc) continue;
    double feas = 0.0;
    for (const auto& sl : slabs) feas = std::max(feas, std::abs(x[sl.a] - x[sl.b]) - sl.len);
    cert.feas = feas;
    if (feas <= tol_feas) {
      cert.converged = true;
      break;
    }
  }
  if (!cert.converged) {
    double feas = 0.0;
    for (const auto& sl : slabs) feas = std::max(feas, std::abs(x[sl.a] - x[sl.b]) - sl.len);
    cert.feas = feas;
  }
  out.u = ScalarField(f.grid_ptr(), std::move(x));
  const auto kkt = kkt_residual(out.u, f, std::max(tol_feas, cert.feas));
  cert.kkt = kkt.kkt;
  cert.slack = kkt.slack;
  return out;
}

Certificate kkt_residual(const ScalarField& u, const ScalarField& f, double tol_feas) {
  require_same_grid(u, f);
  const Grid& g = u.grid();
  const auto& w = g.weights();
  const std::size_t n = g.node_count();
  Certificate cert;
  cert.feas = std::max(0.0, max_edge_violation(u));
  if (cert.feas > tol_feas)
    fail(ErrorCode::InfeasibleInput, "edge violation " + std::to_string(cert.feas) + " exceeds tolerance");

  // Active edge e carries lambda_e >= 0 along sigma_e (e_a - e_b), where
  // sigma_e is the sign of u_a - u_b. Stationarity: r + B^T lambda = 0 with
  // r = W(u - f).
  struct Active {
    NodeId a, b;
    double sigma;
    double gap;  // l - |u_a - u_b|
  };
  std::vector<Active> active;
  for (const auto& e : g.edges()) {
    const double d = u[e.a] - u[e.b];
    if (std::abs(d) >= e.length - (tol_feas + 1e-9 * e.length))
      active.push_back({e.a, e.b, d >= 0 ? 1.0 : -1.0, e.length - std::abs(d)});
  }
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = w[i] * (u[i] - f[i]);

  std::vector<double> lambda(active.size(), 0.0);
  auto residual_of = [&](const std::vector<double>& lam, std::vector<double>& res) {
    res = r;
    for (std::size_t k = 0; k < active.size(); ++k) {
      res[active[k].a] += lam[k] * active[k].sigma;
      res[active[k].b] -= lam[k] * active[k].sigma;
    }
  };
  auto objective_of = [&](const std::vector<double>& res) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += res[i] * res[i] / w[i];
    return 0.5 * s;
  };

  if (!active.empty()) {
    // Spanning forest of the active subgraph: solve the node balances
    // exactly on tree edges, leaves first.
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n);
    std::vector<double> degree(n, 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
      adj[active[k].a].push_back({active[k].b, k});
      adj[active[k].b].push_back({active[k].a, k});
      degree[active[k].a] += 1.0;
      degree[active[k].b] += 1.0;
    }
    std::vector<long> parent_edge(n, -1);
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<NodeId> order;
    for (NodeId root = 0; root < n; ++root) {
      if (seen[root] || adj[root].empty()) continue;
      seen[root] = 1;
      std::size_t head = order.size();
      order.push_back(root);
      while (head < order.size()) {
        const NodeId v = order[head++];
        for (const auto& [nb, k] : adj[v]) {
          if (seen[nb]) continue;
          seen[nb] = 1;
          parent_edge[nb] = static_cast<long>(k);
          order.push_back(nb);
        }
      }
    }
    std::vector<double> balance = r;
    for (std::size_t idx = order.size(); idx-- > 0;) {
      const NodeId v = order[idx];
      if (parent_edge[v] < 0) continue;
      const auto k = static_cast<std::size_t>(parent_edge[v]);
      const Active& e = active[k];
      const double cv = v == e.a ? e.sigma : -e.sigma;
      const NodeId p = v == e.a ? e.b : e.a;
      lambda[k] = std::max(0.0, -balance[v] / cv);
      balance[p] += lambda[k] * -cv;
    }

    // Accelerated projected gradient on 1/2 |r + B^T lambda|^2_{W^-1}.
    double lipschitz = 0.0;
    for (const auto& e : active) lipschitz = std::max(lipschitz, degree[e.a] / w[e.a] + degree[e.b] / w[e.b]);
    const double step = 1.0 / lipschitz;
    std::vector<double> res, y = lambda, next(lambda.size());
    residual_of(lambda, res);
    double best = objective_of(res);
    double t = 1.0;
    const double stop = 1e-30 * (1.0 + best);
    for (int it = 0; it < 20000 && best > stop; ++it) {
      residual_of(y, res);
      for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& e = active[k];
        const double grad = e.sigma * (res[e.a] / w[e.a] - res[e.b] / w[e.b]);
        next[k] = std::max(0.0, y[k] - step * grad);
      }
      residual_of(next, res);
      const double value = objective_of(res);
      if (value > best) {
        // restart momentum
        t = 1.0;
        y = lambda;
        continue;
      }
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      for (std::size_t k = 0; k < lambda.size(); ++k)
        y[k] = next[k] + ((t - 1.0) / t_next) * (next[k] - lambda[k]);
      const double gain = best - value;
      lambda.swap(next);
      best = value;
      t = t_next;
      if (gain <= 1e-15 * best) break;
    }
  }

  std::vector<double> res;
  residual_of(lambda, res);
  cert.kkt = std::sqrt(2.0 * objective_of(res));
  for (std::size_t k = 0; k < active.size(); ++k)
    cert.slack = std::max(cert.slack, lambda[k] * std::max(0.0, active[k].gap));
  return cert;
}

nlohmann::json to_json(const Certificate& c) {
  return {{"iters", c.iterations}, {"feas", c.feas}, {"inc", c.inc},
          {"kkt", c.kkt},          {"slack", c.slack}, {"converged", c.converged}};
}

ScalarField dirichlet_datum(const ScalarField& f) {
  const auto delta = boundary_distance(f.grid_ptr());
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(f[i], -delta[i], delta[i]);
  return ScalarField(f.grid_ptr(), std::move(v));
}

DirichletProjection project_lip_dirichlet(const ScalarField& f, const ProjectOptions& options) {
  DirichletProjection out;
  out.datum = dirichlet_datum(f);
  auto p = project_lip_graph(out.datum, options);
  out.u = std::move(p.u);
  out.certificate = p.certificate;
  for (NodeId b : f.grid().boundary_nodes()) out.boundary_trace = std::max(out.boundary_trace, std::abs(out.u[b]));
  return out;
}

}  // namespace lipfit
