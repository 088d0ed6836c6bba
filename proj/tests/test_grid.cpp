#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lipfit/datasets.hpp"
#include "lipfit/error.hpp"
#include "lipfit/field_io.hpp"
#include "lipfit/metric.hpp"
#include "oracles.hpp"

using namespace lipfit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST_CASE("uniform line") {
  auto g = Grid::line(-1, 1, 101);
  CHECK(g->node_count() == 101);
  CHECK(g->edges().size() == 100);
  CHECK(g->spacing(0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(g->is_boundary(0));
  CHECK(g->is_boundary(100));
  CHECK_FALSE(g->is_boundary(50));
  CHECK(g->normal(0).x == -1.0);
  CHECK(g->normal(100).x == 1.0);
  CHECK(g->measure() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("full square: 8-stencil edges with diagonal length sqrt(2) h") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 41, 41);
  const double h = g->spacing(0);
  CHECK(g->node_count() == 41 * 41);
  // 2 * 40 * 41 axis edges, 2 * 40 * 40 diagonals
  CHECK(g->edges().size() == 2 * 40 * 41 + 2 * 40 * 40);
  std::size_t diagonal = 0;
  for (const auto& e : g->edges()) {
    const Point a = g->coord(e.a), b = g->coord(e.b);
    CHECK(e.length > 0);
    // snapped to a dyadic quantum far below any solver tolerance
    CHECK(e.length == doctest::Approx(std::hypot(a.x - b.x, a.y - b.y)).epsilon(1e-11));
    if (std::abs(e.length - std::sqrt(2.0) * h) < 1e-12) ++diagonal;
  }
  CHECK(diagonal == 2 * 40 * 40);
}

TEST_CASE("edge list is symmetric through the adjacency") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 9, 7, MaskSpec::lshape(), Stencil::Sixteen);
  for (NodeId v = 0; v < g->node_count(); ++v)
    for (const auto& nb : g->neighbors(v)) {
      bool back = false;
      for (const auto& w : g->neighbors(nb.node)) back |= w.node == v && w.length == nb.length;
      CHECK(back);
    }
}

TEST_CASE("lshape removes the open upper-right quadrant") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 41, 41, MaskSpec::lshape());
  for (long j = 0; j < 41; ++j)
    for (long i = 0; i < 41; ++i) {
      const Point p = g->lattice_coord(i, j);
      const bool removed = p.x > 1e-12 && p.y > 1e-12;
      CHECK((g->node_at(i, j) < 0) == removed);
    }
  // connected: every node reachable from node 0
  const auto d = oracle::bellman_ford(*g, 0);
  for (double x : d) CHECK(std::isfinite(x));
}

TEST_CASE("normals of the full square are axis-aligned on the sides") {
  auto g = Grid::plane({-1, 1}, {-1, 1}, 11, 11);
  CHECK(g->normal(g->node_at(0, 5)).x == -1.0);
  CHECK(g->normal(g->node_at(0, 5)).y == 0.0);
  CHECK(g->normal(g->node_at(10, 5)).x == 1.0);
  CHECK(g->normal(g->node_at(5, 0)).y == -1.0);
  CHECK(g->normal(g->node_at(5, 10)).y == 1.0);
}

TEST_CASE("quadrature of 1 on the square converges to 4") {
  for (int n : {11, 41, 101}) {
    auto g = Grid::plane({-1, 1}, {-1, 1}, n, n);
    CHECK(std::abs(g->measure() - 4.0) / 4.0 <= 2.0 / n);
  }
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { Grid::line(1, 1, 11); }) == ErrorCode::DegenerateExtent);
  CHECK(code_of([] { Grid::line(-1, 1, 2); }) == ErrorCode::InvalidArgument);
  std::vector<std::uint8_t> bits(25, 0);
  bits[0] = bits[1] = bits[23] = bits[24] = 1;  // two separate corners
  CHECK(code_of([&] { Grid::plane({0, 1}, {0, 1}, 5, 5, MaskSpec::from_bitmap(bits)); }) ==
        ErrorCode::DisconnectedDomain);
}

TEST_CASE("sampling rules") {
  auto g = Grid::line(-1, 1, 5);
  auto f = ScalarField::sample(g, datasets::double_slope());
  const std::vector<double> want{2, 1, 0, 1, 2};
  for (std::size_t i = 0; i < 5; ++i) CHECK(f[i] == want[i]);

  auto g2 = Grid::line(-1, 1, 101);
  auto c1 = ScalarField::sample(g2, datasets::plateau(1.0, 0.4));
  for (NodeId v = 0; v < g2->node_count(); ++v)
    CHECK(c1[v] == (std::abs(g2->coord(v).x) < 0.4 ? 1.0 : 0.0));

  CHECK(datasets::square_root()({4.0 / 9.0, 0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(code_of([&] { ScalarField::sample(g, [](Point) { return NAN; }); }) == ErrorCode::NonFiniteSample);
}

TEST_CASE("csv and json round trips are bit exact") {
  std::mt19937_64 rng(7);
  auto g = Grid::line(-1, 1, 33);
  auto f = oracle::random_field(g, rng, 1e3);
  std::stringstream ss;
  write_csv(ss, f, R"({"k":1})");
  CHECK(ss.str().rfind("# provenance: ", 0) == 0);
  auto back = read_csv(ss);
  for (NodeId v = 0; v < g->node_count(); ++v) CHECK(back[v] == f[v]);

  auto g2 = Grid::plane({-1, 1}, {-1, 1}, 9, 9, MaskSpec::disk({0, 0}, 1.0));
  auto f2 = oracle::random_field(g2, rng);
  auto back2 = field_from_json(nlohmann::json::parse(field_to_json(f2).dump()));
  CHECK(back2.grid().same_layout(*g2));
  for (NodeId v = 0; v < g2->node_count(); ++v) CHECK(back2[v] == f2[v]);
}

TEST_CASE("geodesic distance examples") {
  auto g = Grid::plane({0, 1}, {0, 1}, 21, 21);
  const NodeId s = static_cast<NodeId>(g->node_at(0, 0));
  auto d = geodesic_distance(g, std::vector<NodeId>{s});
  CHECK(d.distance[g->node_at(20, 20)] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  const double q = d.distance[g->node_at(20, 10)];
  const double e = std::hypot(1.0, 0.5);
  CHECK(q >= e - 1e-12);
  CHECK(q <= e * (1 + kEightStencilAnisotropy));
  CHECK(d.distance[s] == 0.0);
}

TEST_CASE("lshape geodesic rounds the corner") {
  for (int n : {41, 81}) {
    auto g = Grid::plane({-1, 1}, {-1, 1}, n, n, MaskSpec::lshape());
    const double h = g->spacing(0);
    const long ia = std::lround((-0.25 + 1) / h), ja = std::lround((0.5 + 1) / h);
    const long ib = std::lround((0.5 + 1) / h), jb = std::lround((-0.25 + 1) / h);
    const NodeId a = static_cast<NodeId>(g->node_at(ia, ja));
    const NodeId b = static_cast<NodeId>(g->node_at(ib, jb));
    const double d = geodesic_distance(g, std::vector<NodeId>{a}).distance[b];
    const double around = 2 * std::sqrt(0.3125);
    CHECK(d > std::hypot(0.75, 0.75) + 0.05);
    CHECK(d >= around - 1e-12);
    CHECK(d <= around * (1 + kEightStencilAnisotropy));
    CHECK(d == doctest::Approx(oracle::bellman_ford(*g, a)[b]).epsilon(1e-13));
  }
}

TEST_CASE("geodesic errors") {
  auto g = Grid::line(0, 1, 5);
  CHECK(code_of([&] { geodesic_distance(g, std::vector<NodeId>{}); }) == ErrorCode::EmptySourceSet);
  CHECK(code_of([&] { geodesic_distance(g, std::vector<NodeId>{9}); }) == ErrorCode::UnmaskedSource);
}

TEST_CASE("distance properties on random masks") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = Grid::plane({-1, 1}, {-1, 1}, 9, 9, trial % 2 ? MaskSpec::lshape() : MaskSpec::disk({0, 0}, 1.0));
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g->node_count() - 1));
    const NodeId a = pick(rng), b = pick(rng);
    const auto da = geodesic_distance(g, std::vector<NodeId>{a}).distance;
    const auto db = geodesic_distance(g, std::vector<NodeId>{b}).distance;
    CHECK(da[b] == db[a]);
    const auto ref = oracle::bellman_ford(*g, a);
    CHECK(oracle::linf(da.values(), ref) <= 1e-12);
    for (const auto& e : g->edges()) CHECK(da[e.a] <= da[e.b] + e.length);
    const Point pa = g->coord(a);
    for (NodeId v = 0; v < g->node_count(); ++v) {
      const Point p = g->coord(v);
      CHECK(da[v] >= std::hypot(p.x - pa.x, p.y - pa.y) - 1e-12);
    }
  }
}

TEST_CASE("boundary distance") {
  auto g = Grid::line(-1, 1, 101);
  auto d = boundary_distance(g);
  for (NodeId v = 0; v < g->node_count(); ++v)
    CHECK(d[v] == doctest::Approx(1 - std::abs(g->coord(v).x)).epsilon(1e-12));

  auto sq = Grid::plane({-1, 1}, {-1, 1}, 41, 41);
  auto ds = boundary_distance(sq);
  CHECK(ds[sq->node_at(20, 20)] == doctest::Approx(1.0).epsilon(1e-12));
  for (NodeId v : sq->boundary_nodes()) CHECK(ds[v] == 0.0);
  for (const auto& e : sq->edges()) CHECK(std::abs(ds[e.a] - ds[e.b]) <= e.length + 1e-14);

  double prev = 1.0;
  for (int n : {41, 81}) {
    auto disk = Grid::plane({-1, 1}, {-1, 1}, n, n, MaskSpec::disk({0, 0}, 1.0));
    const double c = boundary_distance(disk)[disk->node_at(n / 2, n / 2)];
    const double gap = 1.0 - c;
    CHECK(gap >= 0.0);
    CHECK(gap <= 2 * disk->spacing(0));
    CHECK(gap <= prev);
    prev = gap;
  }
}
