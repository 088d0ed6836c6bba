#pragma once

#include <span>
#include <vector>

#include "lipfit/grid.hpp"

namespace lipfit {

// Worst-case ratio of 8-stencil path length to Euclidean length, minus one:
// sqrt(4 - 2*sqrt(2)) - 1.
inline constexpr double kEightStencilAnisotropy = 0.08239220029239402;

struct DistanceField {
  std::vector<NodeId> sources;
  ScalarField distance;
  // For every node, the source it was reached from (ties: lowest node id).
  std::vector<NodeId> nearest_source;
};

// Shortest-path distance on the stencil graph from a set of masked nodes.
DistanceField geodesic_distance(const GridPtr& grid, std::span<const NodeId> sources);

// Generalised distance transform: out(x) = min_y [labels(y) + d(x, y)] over
// nodes y with finite labels. Single label-setting pass.
ScalarField distance_transform(const GridPtr& grid, std::span<const double> labels);

// d(x, boundary) on the stencil graph; zero on boundary nodes.
ScalarField boundary_distance(const GridPtr& grid);

// Nodes where adjacent nodes were reached from sources farther apart than
// `factor` times the edge joining them (the medial/ridge set of a distance).
std::vector<std::uint8_t> ridge_mask(const Grid& grid, const DistanceField& field, double factor = 2.0);

}  // namespace lipfit
