#include "lipfit/metric.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <utility>

#include "lipfit/error.hpp"

namespace lipfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Label {
  double value;
  NodeId node;
  bool operator>(const Label& o) const {
    return value > o.value || (value == o.value && node > o.node);
  }
};

// Dijkstra from pre-seeded labels; ties pop the lowest node id first.
void label_setting(const Grid& grid, std::vector<double>& dist, std::vector<NodeId>& origin) {
  std::priority_queue<Label, std::vector<Label>, std::greater<>> heap;
  for (NodeId v = 0; v < dist.size(); ++v)
    if (dist[v] < kInf) heap.push({dist[v], v});
  std::vector<std::uint8_t> done(dist.size(), 0);
  while (!heap.empty()) {
    const Label top = heap.top();
    heap.pop();
    if (done[top.node] || top.value != dist[top.node]) continue;
    done[top.node] = 1;
    for (const auto& nb : grid.neighbors(top.node)) {
      const double candidate = top.value + nb.length;
      if (candidate < dist[nb.node]) {
        dist[nb.node] = candidate;
        origin[nb.node] = origin[top.node];
        heap.push({candidate, nb.node});
      }
    }
  }
}

}  // namespace

DistanceField geodesic_distance(const GridPtr& grid, std::span<const NodeId> sources) {
  if (sources.empty()) fail(ErrorCode::EmptySourceSet, "geodesic distance needs at least one source");
  const auto n = grid->node_count();
  std::vector<double> dist(n, kInf);
  std::vector<NodeId> origin(n, 0);
  for (NodeId s : sources) {
    if (s >= n) fail(ErrorCode::UnmaskedSource, "source " + std::to_string(s) + " is not a masked node");
    dist[s] = 0.0;
    origin[s] = s;
  }
  label_setting(*grid, dist, origin);
  for (double d : dist)
    if (!(d < kInf)) fail(ErrorCode::DisconnectedDomain, "unreachable node in distance computation");
  return {std::vector<NodeId>(sources.begin(), sources.end()), ScalarField(grid, std::move(dist)),
          std::move(origin)};
}

ScalarField distance_transform(const GridPtr& grid, std::span<const double> labels) {
  const auto n = grid->node_count();
  if (labels.size() != n) fail(ErrorCode::InvalidArgument, "one label per node required");
  std::vector<double> dist(labels.begin(), labels.end());
  std::vector<NodeId> origin(n);
  bool any = false;
  for (NodeId v = 0; v < n; ++v) {
    origin[v] = v;
    if (dist[v] < kInf) any = true;
  }
  if (!any) fail(ErrorCode::EmptySourceSet, "distance transform with no finite label");
  label_setting(*grid, dist, origin);
  return ScalarField(grid, std::move(dist));
}

ScalarField boundary_distance(const GridPtr& grid) {
  const auto& b = grid->boundary_nodes();
  if (b.empty()) fail(ErrorCode::InvalidArgument, "grid has no boundary nodes");
  return geodesic_distance(grid, b).distance;
}

std::vector<std::uint8_t> ridge_mask(const Grid& grid, const DistanceField& field, double factor) {
  std::vector<std::uint8_t> ridge(grid.node_count(), 0);
  for (NodeId v = 0; v < grid.node_count(); ++v) {
    const Point sv = grid.coord(field.nearest_source[v]);
    for (const auto& nb : grid.neighbors(v)) {
      const Point sw = grid.coord(field.nearest_source[nb.node]);
      if (std::hypot(sv.x - sw.x, sv.y - sw.y) > factor * nb.length) {
        ridge[v] = 1;
        break;
      }
    }
  }
  return ridge;
}

}  // namespace lipfit
