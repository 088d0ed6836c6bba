#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lipfit {

using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class MaskKind { Full, Disk, LShape, Bitmap };

// Which lattice nodes belong to the domain. The L-shape removes the open
// quadrant above and to the right of the extent's midpoint.
struct MaskSpec {
  MaskKind kind = MaskKind::Full;
  Point center{};
  double radius = 1.0;
  std::vector<std::uint8_t> bitmap;  // row-major, nx*ny, only for Bitmap

  static MaskSpec full() { return {}; }
  static MaskSpec disk(Point c, double r) { return {MaskKind::Disk, c, r, {}}; }
  static MaskSpec lshape() { return {MaskKind::LShape, {}, 1.0, {}}; }
  static MaskSpec from_bitmap(std::vector<std::uint8_t> bits) {
    return {MaskKind::Bitmap, {}, 1.0, std::move(bits)};
  }
};

// 2D neighbourhoods: 8 = axis + diagonal moves, 16 adds knight moves.
enum class Stencil { Eight = 8, Sixteen = 16 };

struct Neighbor {
  NodeId node;
  double length;
};

struct Edge {
  NodeId a;  // a < b
  NodeId b;
  double length;
};

// Node-centred uniform lattice over a box, restricted to a node mask.
// Masked nodes are numbered 0..node_count()-1 in row-major lattice order
// (x fastest). Immutable after construction.
class Grid {
 public:
  static std::shared_ptr<const Grid> line(double lo, double hi, int n);
  static std::shared_ptr<const Grid> plane(Interval x, Interval y, int nx, int ny,
                                           const MaskSpec& mask = MaskSpec::full(),
                                           Stencil stencil = Stencil::Eight);

  int dim() const { return dim_; }
  Interval extent(int axis) const { return extent_[axis]; }
  int count(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  double max_spacing() const;
  Stencil stencil() const { return stencil_; }
  const MaskSpec& mask_spec() const { return mask_spec_; }

  std::size_t lattice_size() const { return lattice_mask_.size(); }
  const std::vector<std::uint8_t>& lattice_mask() const { return lattice_mask_; }
  std::size_t node_count() const { return lattice_of_node_.size(); }
  std::size_t lattice_index(NodeId node) const { return lattice_of_node_[node]; }
  // Masked node at lattice position (i, j), or -1 if outside the mask or box.
  long node_at(long i, long j = 0) const;
  std::array<long, 2> lattice_position(NodeId node) const;
  Point coord(NodeId node) const;
  Point lattice_coord(long i, long j) const;

  std::span<const Neighbor> neighbors(NodeId node) const {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }
  std::span<const Edge> edges() const { return edges_; }

  bool is_boundary(NodeId node) const { return boundary_[node] != 0; }
  const std::vector<NodeId>& boundary_nodes() const { return boundary_list_; }
  // Unit outward normal estimate; zero vector at interior nodes.
  Point normal(NodeId node) const { return normals_[node]; }
  // Trapezoid weight: cell volume halved once per axis on which the node
  // has a missing neighbour.
  double weight(NodeId node) const { return weights_[node]; }
  const std::vector<double>& weights() const { return weights_; }
  double measure() const { return measure_; }

  // Same lattice, mask and stencil (value comparison, not identity).
  bool same_layout(const Grid& other) const;
  std::string describe() const;

 private:
  Grid() = default;
  void build(const MaskSpec& mask);

  int dim_ = 1;
  std::array<Interval, 2> extent_{};
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> h_{1.0, 1.0};
  Stencil stencil_ = Stencil::Eight;
  MaskSpec mask_spec_;

  std::vector<std::uint8_t> lattice_mask_;
  std::vector<long> node_of_lattice_;
  std::vector<std::size_t> lattice_of_node_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> boundary_;
  std::vector<NodeId> boundary_list_;
  std::vector<Point> normals_;
  std::vector<double> weights_;
  double measure_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

// One value per masked node of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(GridPtr grid, std::vector<double> values);
  static ScalarField constant(GridPtr grid, double value);
  static ScalarField sample(GridPtr grid, const std::function<double(Point)>& rule);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double integral() const;
  double mean() const;
  double l1_norm() const;
  double l2_norm() const;
  double linf_norm() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

void require_same_grid(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator+(const ScalarField& a, double shift);
ScalarField operator-(const ScalarField& a);
double linf_distance(const ScalarField& a, const ScalarField& b);
double l2_distance(const ScalarField& a, const ScalarField& b);

}  // namespace lipfit
