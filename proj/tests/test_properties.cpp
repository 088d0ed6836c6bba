// Randomized property suites, 1000 trials each.
#include <doctest.h>

#include <cmath>
#include <random>

#include "lipfit/envelope.hpp"
#include "lipfit/lip1d.hpp"
#include "lipfit/metric.hpp"
#include "lipfit/projector.hpp"
#include "oracles.hpp"

using namespace lipfit;

namespace {

constexpr int kTrials = 1000;

// Lines up to 101 nodes, or small 2D grids with an occasional mask.
GridPtr any_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 7);
  switch (pick(rng)) {
    case 0:
      return Grid::plane({-1, 1}, {-1, 1}, 9, 9, MaskSpec::disk({0, 0}, 1));
    case 1:
      return Grid::plane({-1, 1}, {-1, 1}, 8, 8, MaskSpec::lshape());
    default:
      return oracle::random_grid(rng);
  }
}

struct Projected {
  ScalarField u;
  double tol;  // how exact this solver is
};

Projected project(const ScalarField& f) {
  if (f.grid().dim() == 1) return {project_lip_1d(f), 1e-12};
  auto p = project_lip_graph(f);
  REQUIRE(p.certificate.converged);
  return {p.u, 1e-6};
}

}  // namespace

TEST_CASE("projection is idempotent") {
  std::mt19937_64 rng(1001);
  double worst = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    auto f = oracle::random_field(g, rng);
    const auto u = project(f).u;
    const auto uu = project(u).u;
    worst = std::max(worst, oracle::linf(u.values(), uu.values()));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("projection is nonexpansive in L2") {
  std::mt19937_64 rng(1002);
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    auto f = oracle::random_field(g, rng);
    auto h = oracle::random_field(g, rng);
    const auto pf = project(f), ph = project(h);
    const double out = oracle::weighted_l2(*g, pf.u.values(), ph.u.values());
    const double in = oracle::weighted_l2(*g, f.values(), h.values());
    CHECK(out <= in + pf.tol * (1 + f.l2_norm() + h.l2_norm()));
  }
}

TEST_CASE("projection preserves the mean") {
  std::mt19937_64 rng(1003);
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    auto f = oracle::random_field(g, rng);
    const auto u = project(f).u;
    std::vector<double> diff(f.size());
    for (NodeId v = 0; v < f.size(); ++v) diff[v] = u[v] - f[v];
    CHECK(std::abs(oracle::weighted_sum(*g, diff)) <= 1e-6 * f.l1_norm());
  }
}

TEST_CASE("DP and Dykstra agree in 1D") {
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> n(3, 40);
  double worst = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto g = Grid::line(-1, 1, n(rng));
    auto f = oracle::random_field(g, rng);
    ProjectOptions o;
    o.tol_inc = 1e-10;
    auto p = project_lip_graph(f, o);
    REQUIRE(p.certificate.converged);
    worst = std::max(worst, oracle::linf(p.u.values(), project_lip_1d(f).values()));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("geodesic distance satisfies the triangle inequality") {
  std::mt19937_64 rng(1005);
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    std::uniform_int_distribution<NodeId> node(0, g->node_count() - 1);
    const NodeId a = node(rng), b = node(rng), c = node(rng);
    const NodeId sa[] = {a}, sb[] = {b};
    const auto da = geodesic_distance(g, sa).distance;
    const auto db = geodesic_distance(g, sb).distance;
    // exact along every edge: no relaxation is left undone
    for (const Edge& e : g->edges()) {
      CHECK(da[e.b] <= da[e.a] + e.length);
      CHECK(da[e.a] <= da[e.b] + e.length);
    }
    CHECK(da[c] <= da[b] + db[c]);
  }
}

TEST_CASE("envelope is below every 1-Lipschitz majorant") {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    auto f = oracle::random_field(g, rng);
    const auto up = upper_envelope(f);
    auto bumped = f;
    for (NodeId v = 0; v < g->node_count(); ++v) bumped[v] += noise(rng);
    const auto major = upper_envelope(bumped);
    for (NodeId v = 0; v < g->node_count(); ++v) CHECK(up[v] <= major[v]);
    CHECK(max_edge_violation(major) <= 1e-14);
  }
}

TEST_CASE("envelopes bracket the projection") {
  std::mt19937_64 rng(1007);
  for (int t = 0; t < kTrials; ++t) {
    auto g = any_grid(rng);
    auto f = oracle::random_field(g, rng);
    const auto [u, tol] = project(f);
    const auto up = upper_envelope(f), lo = lower_envelope(f);
    const double slack = std::max(tol, 1e-8 * std::sqrt(2.0) * g->spacing(0));
    for (NodeId v = 0; v < g->node_count(); ++v) {
      CHECK(lo[v] <= u[v] + slack);
      CHECK(u[v] <= up[v] + slack);
    }
  }
}
