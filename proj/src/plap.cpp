#include "lipfit/plap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "lipfit/error.hpp"
#include "lipfit/field_io.hpp"

namespace lipfit {

namespace {

struct Cell {
  std::array<NodeId, 4> corner{};  // 1D: 2 used; 2D: (0,0) (1,0) (0,1) (1,1)
  double vol = 0.0;
};

struct Cells {
  int dim = 1;
  double hx = 1.0, hy = 1.0;
  std::vector<Cell> list;
};

Cells build_cells(const Grid& g) {
  Cells c;
  c.dim = g.dim();
  c.hx = g.spacing(0);
  if (g.dim() == 1) {
    for (long i = 0; i + 1 < g.count(0); ++i) {
      const long a = g.node_at(i), b = g.node_at(i + 1);
      if (a < 0 || b < 0) continue;
      Cell cell;
      cell.corner[0] = static_cast<NodeId>(a);
      cell.corner[1] = static_cast<NodeId>(b);
      cell.vol = c.hx;
      c.list.push_back(cell);
    }
    return c;
  }
  c.hy = g.spacing(1);
  for (long j = 0; j + 1 < g.count(1); ++j)
    for (long i = 0; i + 1 < g.count(0); ++i) {
      const long n00 = g.node_at(i, j), n10 = g.node_at(i + 1, j);
      const long n01 = g.node_at(i, j + 1), n11 = g.node_at(i + 1, j + 1);
      if (n00 < 0 || n10 < 0 || n01 < 0 || n11 < 0) continue;
      Cell cell;
      cell.corner = {static_cast<NodeId>(n00), static_cast<NodeId>(n10), static_cast<NodeId>(n01),
                     static_cast<NodeId>(n11)};
      cell.vol = c.hx * c.hy;
      c.list.push_back(cell);
    }
  return c;
}

std::array<double, 2> cell_gradient(const Cells& c, const Cell& cell, std::span<const double> v) {
  const auto& k = cell.corner;
  if (c.dim == 1) return {(v[k[1]] - v[k[0]]) / c.hx, 0.0};
  return {0.5 * ((v[k[1]] - v[k[0]]) + (v[k[3]] - v[k[2]])) / c.hx,
          0.5 * ((v[k[2]] - v[k[0]]) + (v[k[3]] - v[k[1]])) / c.hy};
}

double gradient_term(const Cells& c, std::span<const double> v, double p) {
  double s = 0.0;
  for (const auto& cell : c.list) {
    const auto g = cell_gradient(c, cell, v);
    s += std::pow(std::hypot(g[0], g[1]), p) * cell.vol;
  }
  return s;
}

double fidelity_term(std::span<const double> v, std::span<const double> f, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * (v[i] - f[i]) * (v[i] - f[i]);
  return 0.5 * s;
}

double energy_of(const Cells& c, std::span<const double> v, std::span<const double> f,
                 const std::vector<double>& w, double p) {
  return gradient_term(c, v, p) / p + fidelity_term(v, f, w);
}

void gradient_of(const Cells& c, std::span<const double> v, std::span<const double> f,
                 const std::vector<double>& w, double p, std::vector<double>& out) {
  out.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = w[i] * (v[i] - f[i]);
  for (const auto& cell : c.list) {
    const auto g = cell_gradient(c, cell, v);
    const double norm = std::hypot(g[0], g[1]);
    if (norm == 0.0) continue;
    const double s = std::pow(norm, p - 2.0) * cell.vol;
    const auto& k = cell.corner;
    if (c.dim == 1) {
      out[k[0]] -= s * g[0] / c.hx;
      out[k[1]] += s * g[0] / c.hx;
      continue;
    }
    const double ax = 0.5 * s * g[0] / c.hx, ay = 0.5 * s * g[1] / c.hy;
    out[k[0]] += -ax - ay;
    out[k[1]] += ax - ay;
    out[k[2]] += -ax + ay;
    out[k[3]] += ax + ay;
  }
}

void require_exponent(double p) {
  if (!(p >= 2.0) || !std::isfinite(p)) fail(ErrorCode::InvalidArgument, "p must be finite and >= 2");
}

double w_dot(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

}  // namespace

double energy_p(const ScalarField& v, const ScalarField& f, double p) {
  require_same_grid(v, f);
  require_exponent(p);
  const double e = energy_of(build_cells(v.grid()), v.values(), f.values(), v.grid().weights(), p);
  if (!std::isfinite(e)) fail(ErrorCode::NonFiniteEnergy, "energy overflowed at p = " + format_double(p));
  return e;
}

double cell_gradient_norm(const ScalarField& v, double p) {
  require_exponent(p);
  const Cells c = build_cells(v.grid());
  // Scale by the largest gradient first so large p does not overflow.
  double top = 0.0;
  for (const auto& cell : c.list) {
    const auto g = cell_gradient(c, cell, v.values());
    top = std::max(top, std::hypot(g[0], g[1]));
  }
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& cell : c.list) {
    const auto g = cell_gradient(c, cell, v.values());
    s += std::pow(std::hypot(g[0], g[1]) / top, p) * cell.vol;
  }
  return top * std::pow(s, 1.0 / p);
}

std::vector<double> energy_gradient(const ScalarField& v, const ScalarField& f, double p) {
  require_same_grid(v, f);
  require_exponent(p);
  std::vector<double> out;
  gradient_of(build_cells(v.grid()), v.values(), f.values(), v.grid().weights(), p, out);
  return out;
}

PMinimum minimize_p(const ScalarField& f, double p, const MinimizeOptions& options, const ScalarField* warm_start) {
  require_exponent(p);
  if (warm_start) require_same_grid(*warm_start, f);
  const Grid& grid = f.grid();
  const auto& w = grid.weights();
  const Cells cells = build_cells(grid);
  const double tol = options.tol > 0 ? options.tol : 1e-8 * (1.0 + f.l2_norm());
  const std::size_t n = f.size();
  const auto data = f.values();

  std::vector<double> x = warm_start ? std::vector<double>(warm_start->values().begin(), warm_start->values().end())
                                     : std::vector<double>(data.begin(), data.end());
  double energy = energy_of(cells, x, data, w, p);
  if (!std::isfinite(energy)) fail(ErrorCode::NonFiniteEnergy, "starting energy is not finite");

  // Everything below lives in the W inner product: riesz = W^-1 gradient.
  std::vector<double> grad, riesz(n), trial(n), dir(n), q(n);
  auto refresh = [&](const std::vector<double>& at) {
    gradient_of(cells, at, data, w, p, grad);
    for (std::size_t i = 0; i < n; ++i) riesz[i] = grad[i] / w[i];
    return std::sqrt(w_dot(riesz, riesz, w));
  };

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> history;

  PMinimum out;
  if (options.record_energy) out.energy_trace.push_back(energy);
  double gnorm = refresh(x);
  long it = 0;
  while (gnorm > tol && it < options.max_iter) {
    ++it;
    // two-loop recursion
    q = riesz;
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * w_dot(history[k].s, q, w);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * history[k].y[i];
    }
    if (!history.empty()) {
      const auto& last = history.back();
      const double gamma = w_dot(last.s, last.y, w) / w_dot(last.y, last.y, w);
      for (auto& v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
      const double beta = history[k].rho * w_dot(history[k].y, q, w);
      for (std::size_t i = 0; i < n; ++i) q[i] += history[k].s[i] * (alpha[k] - beta);
    }
    for (std::size_t i = 0; i < n; ++i) dir[i] = -q[i];
    double slope = w_dot(riesz, dir, w);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -riesz[i];
      slope = -gnorm * gnorm;
    }

    // Stall is judged on the largest nodal displacement, relative to |x|.
    double dir_max = 0.0, x_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir_max = std::max(dir_max, std::abs(dir[i]));
      x_max = std::max(x_max, std::abs(x[i]));
    }
    const double floor = 1e-16 * (1.0 + x_max);
    double step = history.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    double next_energy = 0.0;
    bool accepted = false;
    while (step * dir_max >= floor) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * dir[i];
      next_energy = energy_of(cells, trial, data, w, p);
      if (std::isfinite(next_energy) && next_energy <= energy + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the decrease drowns in round-off of E; fall back
      // to the approximate Armijo test on the directional derivative.
      if (std::isfinite(next_energy) && std::abs(next_energy - energy) <= 1e-12 * std::abs(energy)) {
        gradient_of(cells, trial, data, w, p, grad);
        double trial_slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) trial_slope += grad[i] * dir[i];
        if (trial_slope <= -(1.0 - 2e-4) * slope) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!history.empty()) {
        history.clear();
        continue;
      }
      fail(ErrorCode::LineSearchStalled,
           "line search stalled at p = " + format_double(p) + ", gradient norm " + format_double(gnorm));
    }

    Pair pair;
    pair.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) pair.s[i] = trial[i] - x[i];
    pair.y = riesz;
    x.swap(trial);
    energy = next_energy;
    gnorm = refresh(x);
    for (std::size_t i = 0; i < n; ++i) pair.y[i] = riesz[i] - pair.y[i];
    const double sy = w_dot(pair.s, pair.y, w);
    if (sy > 1e-300) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (history.size() > static_cast<std::size_t>(std::max(1, options.memory))) history.pop_front();
    }
    if (options.record_energy) out.energy_trace.push_back(energy);
  }

  out.u = ScalarField(f.grid_ptr(), std::move(x));
  out.iterations = it;
  out.energy = energy;
  out.grad_norm = gnorm;
  out.converged = gnorm <= tol;
  return out;
}

bool PSweepReport::converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const PSweepRow& r) { return r.converged; });
}

PSweepReport p_sweep(const ScalarField& f, const std::vector<double>& ps, const ScalarField& reference,
                     const MinimizeOptions& options, bool cold_start) {
  require_same_grid(f, reference);
  if (ps.empty()) fail(ErrorCode::InvalidArgument, "empty exponent list");
  for (std::size_t k = 0; k < ps.size(); ++k) {
    require_exponent(ps[k]);
    if (k > 0 && !(ps[k] > ps[k - 1])) fail(ErrorCode::InvalidArgument, "exponents must increase");
  }
  PSweepReport report;
  report.f_l2 = f.l2_norm();
  report.f_linf = f.linf_norm();
  report.f_l1 = f.l1_norm();
  const double mass = f.grid().measure();
  ScalarField previous;
  for (double p : ps) {
    const auto m = minimize_p(f, p, options, cold_start || previous.size() == 0 ? nullptr : &previous);
    PSweepRow row;
    row.p = p;
    row.sup_distance = linf_distance(m.u, reference);
    row.linf = m.u.linf_norm();
    row.l2 = m.u.l2_norm();
    row.grad_lp = cell_gradient_norm(m.u, p);
    row.grad_bound = std::pow(p * report.f_l2 * report.f_l2, 1.0 / p);
    row.mean_diff = (m.u - f).integral() / mass;
    row.energy = m.energy;
    row.iterations = m.iterations;
    row.converged = m.converged;
    report.rows.push_back(row);
    previous = m.u;
  }
  return report;
}

void write_csv(std::ostream& os, const PSweepReport& report, const std::string& provenance) {
  if (!provenance.empty()) os << "# provenance: " << provenance << '\n';
  os << "p,sup_distance,linf,l2,f_l2,grad_lp,grad_bound,mean_diff,energy,iterations,converged\n";
  for (const auto& r : report.rows)
    os << format_double(r.p) << ',' << format_double(r.sup_distance) << ',' << format_double(r.linf) << ','
       << format_double(r.l2) << ',' << format_double(report.f_l2) << ',' << format_double(r.grad_lp) << ','
       << format_double(r.grad_bound) << ',' << format_double(r.mean_diff) << ',' << format_double(r.energy)
       << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
}

}  // namespace lipfit
