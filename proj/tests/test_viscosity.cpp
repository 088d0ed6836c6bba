#include <doctest.h>

#include <cmath>

#include "lipfit/datasets.hpp"
#include "lipfit/error.hpp"
#include "lipfit/lip1d.hpp"
#include "lipfit/metric.hpp"
#include "lipfit/projector.hpp"
#include "lipfit/viscosity.hpp"
#include "oracles.hpp"

using namespace lipfit;

namespace {

struct Solved {
  GridPtr g;
  ScalarField f;
  ScalarField u;
  RegionReport report;
};

Solved solve_1d(const datasets::Rule& rule, int n) {
  auto g = Grid::line(-1, 1, n);
  auto f = ScalarField::sample(g, rule);
  auto u = project_lip_1d(f);
  auto report = regions(u, f, default_tau(*g));
  return {g, f, u, report};
}

// Extent of a region in x.
std::pair<double, double> span_of(const Grid& g, const NodeMask& m) {
  double lo = 1e9, hi = -1e9;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (m[v]) lo = std::min(lo, g.coord(v).x), hi = std::max(hi, g.coord(v).x);
  return {lo, hi};
}

}  // namespace

TEST_CASE("regions of u = f are empty") {
  auto g = Grid::line(-1, 1, 51);
  auto f = ScalarField::sample(g, datasets::double_slope());
  auto r = regions(f, f, default_tau(*g));
  CHECK(count(r.omega_plus) == 0);
  CHECK(count(r.omega_minus) == 0);
  CHECK(count(r.a_plus) == 0);
  auto other = Grid::line(-1, 1, 52);
  CHECK_THROWS_AS(regions(f, ScalarField::constant(other, 0), 0.1), Error);
}

TEST_CASE("case 2 regions: u above f inside |x| < 1/2") {
  auto s = solve_1d(datasets::double_slope(), 401);
  const double h = s.g->spacing(0);
  const double slack = 2 * h + s.report.tau;
  auto [plo, phi] = span_of(*s.g, s.report.omega_plus);
  CHECK(std::abs(plo + 0.5) <= slack);
  CHECK(std::abs(phi - 0.5) <= slack);
  for (NodeId v = 0; v < s.g->node_count(); ++v) {
    CHECK_FALSE((s.report.omega_plus[v] && s.report.omega_minus[v]));
    if (s.report.omega_plus[v]) CHECK(s.report.a_plus[v]);
    if (s.report.omega_minus[v]) CHECK(s.report.a_minus[v]);
    const double x = std::abs(s.g->coord(v).x);
    if (x > 0.5 + slack) CHECK(s.report.omega_minus[v]);
  }
  CHECK(s.report.boundary_minus[0]);
  CHECK(s.report.boundary_minus[400]);
}

TEST_CASE("case 1 regions") {
  auto s = solve_1d(datasets::plateau(1.0, 0.4), 801);
  const double h = s.g->spacing(0);
  for (NodeId v = 0; v < s.g->node_count(); ++v) {
    const double x = std::abs(s.g->coord(v).x);
    if (x < 0.4 - 2 * h) CHECK(s.report.omega_minus[v]);
    if (x > 0.4 + 2 * h && s.u[v] > s.report.tau + 2 * h) CHECK(s.report.omega_plus[v]);
    if (s.report.omega_plus[v]) CHECK(x > 0.4 - 2 * h);
  }
  CHECK(count(s.report.omega_plus) > 0);
  CHECK(count(s.report.omega_minus) > 0);
}

TEST_CASE("eikonal residual of the case 2 projection") {
  auto s = solve_1d(datasets::double_slope(), 401);
  auto r = eikonal_residual(s.u, s.report);
  CHECK(r.plus.count > 0);
  CHECK(r.minus.count > 0);
  CHECK(r.plus.max <= 0.1);
  CHECK(r.minus.max <= 0.1);
}

TEST_CASE("boundary distance solves the eikonal equation off the ridge") {
  for (int n : {21, 41}) {
    auto g = Grid::plane({-1, 1}, {-1, 1}, n, n);
    auto dist = geodesic_distance(g, g->boundary_nodes());
    NodeMask interior(g->node_count(), 0);
    for (NodeId v = 0; v < g->node_count(); ++v) interior[v] = !g->is_boundary(v);
    auto report = forced_regions(*g, NodeMask(g->node_count(), 0), interior);
    const NodeMask ridge = ridge_mask(*g, dist);
    ResidualOptions opt;
    opt.ridge = &ridge;
    auto r = eikonal_residual(dist.distance, report, opt);
    CHECK(r.minus.count > 0);
    CHECK(r.minus.max <= std::sqrt(g->spacing(0)));
  }
}

TEST_CASE("the zero field is not an eikonal solution") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 15, 15);
  NodeMask all(g->node_count(), 1);
  auto report = forced_regions(*g, NodeMask(g->node_count(), 0), all);
  ResidualOptions opt;
  opt.collar = 0;
  auto r = eikonal_residual(ScalarField::constant(g, 0.0), report, opt);
  CHECK(r.minus.max == 1.0);
  CHECK(r.minus.mean == 1.0);
}

TEST_CASE("infinity laplacian") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 21, 21);
  auto affine = ScalarField::sample(g, [](Point p) { return 0.3 * p.x - 0.7 * p.y + 2; });
  auto la = infinity_laplacian(affine);
  for (NodeId v = 0; v < g->node_count(); ++v)
    if (!g->is_boundary(v)) CHECK(std::abs(la[v]) <= 1e-12);

  auto line = Grid::line(-1, 1, 201);
  const double h = line->spacing(0);
  auto cone = ScalarField::sample(line, [](Point p) { return std::abs(p.x - 0.3); });
  auto lc = infinity_laplacian(cone);
  for (NodeId v = 1; v + 1 < line->node_count(); ++v)
    if (std::abs(line->coord(v).x - 0.3) > 1.5 * h) CHECK(std::abs(lc[v]) <= 1e-10);

  auto parab = ScalarField::sample(line, [](Point p) { return 0.5 * p.x * p.x; });
  auto normalized = infinity_laplacian(parab, true);
  auto raw = infinity_laplacian(parab, false);
  for (NodeId v = 1; v + 1 < line->node_count(); ++v) {
    const double x = line->coord(v).x;
    CHECK(std::abs(normalized[v] - 1.0) <= 1e-9);
    CHECK(std::abs(raw[v] - x * x) <= 2 * h);
  }
}

TEST_CASE("combined residual is bounded by the eikonal residual") {
  for (auto rule : {datasets::double_slope(), datasets::square_root()}) {
    auto s = solve_1d(rule, 401);
    auto eik = eikonal_residual(s.u, s.report);
    auto comb = combined_residual(s.u, s.report);
    const double h = s.g->spacing(0);
    for (NodeId v = 0; v < s.g->node_count(); ++v) {
      CHECK(comb.counted[v] == eik.counted[v]);
      if (comb.counted[v]) CHECK(comb.value[v] <= eik.value[v] + 5 * h);
    }
  }
}

TEST_CASE("boundary conditions") {
  auto s = solve_1d(datasets::double_slope(), 401);
  auto b = boundary_condition_check(s.u, s.report);
  CHECK(b.slack == doctest::Approx(3 * s.g->spacing(0)));
  CHECK(b.rows.size() == 2);
  CHECK(b.pass());

  auto g = Grid::line(-1, 1, 101);
  auto feasible = ScalarField::sample(g, [](Point p) { return 0.5 * p.x; });
  auto vacuous = boundary_condition_check(feasible, regions(feasible, feasible, default_tau(*g)));
  CHECK(vacuous.rows.empty());
  CHECK(vacuous.pass());

  // f = -2|x|: u = -|x| - 1/2 sits above f at both ends. Flattening u at the
  // left end breaks 1 - |grad u| <= slack there.
  auto f = ScalarField::sample(g, [](Point p) { return -2 * std::abs(p.x); });
  auto u = project_lip_1d(f);
  auto report = regions(u, f, default_tau(*g));
  REQUIRE(report.boundary_plus[0]);
  CHECK(boundary_condition_check(u, report).pass());
  u[0] = u[1];
  auto broken = boundary_condition_check(u, report);
  CHECK_FALSE(broken.pass());
  CHECK(broken.violations[0] == 1);
}

TEST_CASE("projections satisfy the double inequality") {
  auto s = solve_1d(datasets::square_root(), 401);
  CHECK(double_inequality_check(s.u).pass);
  CHECK(double_inequality_check(s.u).max_slope <= 1 + 1e-8);
  CHECK_FALSE(double_inequality_check(s.f).pass);

  auto g = Grid::plane({-1, 1}, {-1, 1}, 21, 21, MaskSpec::lshape());
  auto f = ScalarField::sample(g, [](Point p) { return 3 * p.x * p.y; });
  // Dykstra output is feasible to 1e-8 of the longest edge
  CHECK(double_inequality_check(project_lip_graph(f).u, 1e-6).pass);
}

TEST_CASE("region report json") {
  auto s = solve_1d(datasets::double_slope(), 101);
  auto j = to_json(s.report, *s.g);
  for (const char* key : {"omega_plus", "omega_minus", "a_plus", "a_minus", "boundary_plus", "boundary_minus"})
    CHECK(j.contains(key));
  CHECK(j["omega_plus"]["count"].get<std::size_t>() == count(s.report.omega_plus));
}
