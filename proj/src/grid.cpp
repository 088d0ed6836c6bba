#include "lipfit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "lipfit/error.hpp"

namespace lipfit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateExtent: return "DegenerateExtent";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptySourceSet: return "EmptySourceSet";
    case ErrorCode::UnmaskedSource: return "UnmaskedSource";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
    case ErrorCode::NonConvexValueFunction: return "NonConvexValueFunction";
    case ErrorCode::InfeasibleInput: return "InfeasibleInput";
    case ErrorCode::InfeasibleSegment: return "InfeasibleSegment";
    case ErrorCode::NonFiniteEnergy: return "NonFiniteEnergy";
    case ErrorCode::LineSearchStalled: return "LineSearchStalled";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

struct Offset {
  int di;
  int dj;
};

std::vector<Offset> stencil_offsets(int dim, Stencil stencil) {
  if (dim == 1) return {{-1, 0}, {1, 0}};
  std::vector<Offset> offsets = {{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                                 {-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
  if (stencil == Stencil::Sixteen) {
    for (int a : {-1, 1})
      for (int b : {-2, 2}) {
        offsets.push_back({a, b});
        offsets.push_back({b, a});
      }
  }
  return offsets;
}

void check_axis(Interval iv, int n) {
  if (n < 3) fail(ErrorCode::InvalidArgument, "need at least 3 nodes per axis");
  if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
    fail(ErrorCode::DegenerateExtent, "extent hi must exceed lo");
}

const char* mask_name(MaskKind kind) {
  switch (kind) {
    case MaskKind::Full: return "full";
    case MaskKind::Disk: return "disk";
    case MaskKind::LShape: return "lshape";
    case MaskKind::Bitmap: return "bitmap";
  }
  return "?";
}

}  // namespace

GridPtr Grid::line(double lo, double hi, int n) {
  check_axis({lo, hi}, n);
  std::shared_ptr<Grid> g(new Grid());
  g->dim_ = 1;
  g->extent_ = {Interval{lo, hi}, Interval{0.0, 0.0}};
  g->n_ = {n, 1};
  g->h_ = {(hi - lo) / (n - 1), 1.0};
  g->build(MaskSpec::full());
  return g;
}

GridPtr Grid::plane(Interval x, Interval y, int nx, int ny, const MaskSpec& mask,
                    Stencil stencil) {
  check_axis(x, nx);
  check_axis(y, ny);
  std::shared_ptr<Grid> g(new Grid());
  g->dim_ = 2;
  g->extent_ = {x, y};
  g->n_ = {nx, ny};
  g->h_ = {(x.hi - x.lo) / (nx - 1), (y.hi - y.lo) / (ny - 1)};
  g->stencil_ = stencil;
  g->build(mask);
  return g;
}

double Grid::min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }
double Grid::max_spacing() const { return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]); }

Point Grid::lattice_coord(long i, long j) const {
  Point p;
  p.x = extent_[0].lo + (extent_[0].hi - extent_[0].lo) * static_cast<double>(i) / (n_[0] - 1);
  if (dim_ == 2)
    p.y = extent_[1].lo + (extent_[1].hi - extent_[1].lo) * static_cast<double>(j) / (n_[1] - 1);
  return p;
}

long Grid::node_at(long i, long j) const {
  if (i < 0 || j < 0 || i >= n_[0] || j >= n_[1]) return -1;
  return node_of_lattice_[static_cast<std::size_t>(j) * n_[0] + i];
}

std::array<long, 2> Grid::lattice_position(NodeId node) const {
  const auto k = static_cast<long>(lattice_of_node_[node]);
  return {k % n_[0], k / n_[0]};
}

Point Grid::coord(NodeId node) const {
  auto [i, j] = lattice_position(node);
  return lattice_coord(i, j);
}

void Grid::build(const MaskSpec& mask) {
  mask_spec_ = mask;
  const int nx = n_[0];
  const int ny = n_[1];
  const std::size_t total = static_cast<std::size_t>(nx) * ny;
  lattice_mask_.assign(total, 0);

  const double scale = std::max(std::abs(extent_[0].hi - extent_[0].lo),
                                std::abs(extent_[1].hi - extent_[1].lo));
  const double mid_x = 0.5 * (extent_[0].lo + extent_[0].hi);
  const double mid_y = 0.5 * (extent_[1].lo + extent_[1].hi);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point p = lattice_coord(i, j);
      bool inside = true;
      switch (mask.kind) {
        case MaskKind::Full: break;
        case MaskKind::Disk: {
          if (dim_ != 2 || !(mask.radius > 0))
            fail(ErrorCode::InvalidArgument, "disk mask needs a 2D grid and radius > 0");
          const double dx = p.x - mask.center.x;
          const double dy = p.y - mask.center.y;
          inside = std::hypot(dx, dy) <= mask.radius * (1.0 + 1e-12);
          break;
        }
        case MaskKind::LShape:
          if (dim_ != 2) fail(ErrorCode::InvalidArgument, "lshape mask needs a 2D grid");
          inside = !(p.x > mid_x + 1e-12 * scale && p.y > mid_y + 1e-12 * scale);
          break;
        case MaskKind::Bitmap:
          if (mask.bitmap.size() != total)
            fail(ErrorCode::InvalidArgument, "bitmap size does not match lattice");
          inside = mask.bitmap[static_cast<std::size_t>(j) * nx + i] != 0;
          break;
      }
      lattice_mask_[static_cast<std::size_t>(j) * nx + i] = inside ? 1 : 0;
    }
  }

  node_of_lattice_.assign(total, -1);
  lattice_of_node_.clear();
  for (std::size_t k = 0; k < total; ++k) {
    if (lattice_mask_[k]) {
      node_of_lattice_[k] = static_cast<long>(lattice_of_node_.size());
      lattice_of_node_.push_back(k);
    }
  }
  const std::size_t count = lattice_of_node_.size();
  if (count < 2) fail(ErrorCode::InvalidArgument, "mask must contain at least 2 nodes");

  // An edge is kept only if every lattice node in the bounding box of its
  // offset is masked, so that it does not cut across a hole.
  auto box_inside = [&](long i, long j, const Offset& o) {
    const long i0 = std::min<long>(i, i + o.di), i1 = std::max<long>(i, i + o.di);
    const long j0 = std::min<long>(j, j + o.dj), j1 = std::max<long>(j, j + o.dj);
    for (long jj = j0; jj <= j1; ++jj)
      for (long ii = i0; ii <= i1; ++ii)
        if (node_at(ii, jj) < 0) return false;
    return true;
  };

  const auto offsets = stencil_offsets(dim_, stencil_);
  // Edge lengths are snapped to multiples of a power of two q, with q chosen
  // so that twice the longest possible simple path stays below 2^53 q. Path
  // sums, and sums of two of them, are then exact: the graph metric is
  // exactly symmetric and satisfies the triangle inequality bit for bit.
  double longest = 0.0;
  for (const auto& o : offsets) longest = std::max(longest, std::hypot(o.di * h_[0], dim_ == 2 ? o.dj * h_[1] : 0.0));
  const double path_bound = 2.0 * longest * static_cast<double>(count);
  const int quantum_exp = std::ilogb(path_bound) + 1 - 53;
  auto snap = [quantum_exp](double len) {
    return std::ldexp(std::nearbyint(std::ldexp(len, -quantum_exp)), quantum_exp);
  };
  offsets_.assign(count + 1, 0);
  adjacency_.clear();
  for (NodeId v = 0; v < count; ++v) {
    auto [i, j] = lattice_position(v);
    std::vector<Neighbor> local;
    for (const auto& o : offsets) {
      const long w = node_at(i + o.di, j + o.dj);
      if (w < 0 || !box_inside(i, j, o)) continue;
      const double len = snap(std::hypot(o.di * h_[0], dim_ == 2 ? o.dj * h_[1] : 0.0));
      local.push_back({static_cast<NodeId>(w), len});
    }
    std::sort(local.begin(), local.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    adjacency_.insert(adjacency_.end(), local.begin(), local.end());
    offsets_[v + 1] = adjacency_.size();
  }

  edges_.clear();
  for (NodeId v = 0; v < count; ++v)
    for (const auto& nb : neighbors(v))
      if (nb.node > v) edges_.push_back({v, nb.node, nb.length});

  // Connectivity over the edge graph.
  std::vector<std::uint8_t> seen(count, 0);
  std::deque<NodeId> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (const auto& nb : neighbors(v))
      if (!seen[nb.node]) {
        seen[nb.node] = 1;
        ++reached;
        queue.push_back(nb.node);
      }
  }
  if (reached != count)
    fail(ErrorCode::DisconnectedDomain,
         std::to_string(count - reached) + " masked nodes unreachable from node 0");

  // Boundary flags, normals and trapezoid weights from the lattice neighbourhood.
  boundary_.assign(count, 0);
  normals_.assign(count, Point{});
  weights_.assign(count, 0.0);
  boundary_list_.clear();
  measure_ = 0.0;
  for (NodeId v = 0; v < count; ++v) {
    auto [i, j] = lattice_position(v);
    double nxs = 0.0, nys = 0.0;
    bool on_boundary = false;
    const int jr = dim_ == 2 ? 1 : 0;
    for (int dj = -jr; dj <= jr; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0) continue;
        if (node_at(i + di, j + dj) >= 0) continue;
        on_boundary = true;
        const double ox = di * h_[0];
        const double oy = dim_ == 2 ? dj * h_[1] : 0.0;
        const double len = std::hypot(ox, oy);
        nxs += ox / len;
        nys += oy / len;
      }
    if (on_boundary) {
      boundary_[v] = 1;
      boundary_list_.push_back(v);
      const double len = std::hypot(nxs, nys);
      if (len > 0) normals_[v] = {nxs / len, nys / len};
    }
    double w = h_[0];
    if (node_at(i - 1, j) < 0 || node_at(i + 1, j) < 0) w *= 0.5;
    if (dim_ == 2) {
      w *= h_[1];
      if (node_at(i, j - 1) < 0 || node_at(i, j + 1) < 0) w *= 0.5;
    }
    weights_[v] = w;
    measure_ += w;
  }
}

bool Grid::same_layout(const Grid& other) const {
  if (this == &other) return true;
  return dim_ == other.dim_ && n_ == other.n_ && stencil_ == other.stencil_ &&
         extent_[0].lo == other.extent_[0].lo && extent_[0].hi == other.extent_[0].hi &&
         extent_[1].lo == other.extent_[1].lo && extent_[1].hi == other.extent_[1].hi &&
         lattice_mask_ == other.lattice_mask_;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "dim=" << dim_ << " n=" << n_[0];
  if (dim_ == 2) os << "x" << n_[1];
  os << " extent=[" << extent_[0].lo << "," << extent_[0].hi << "]";
  if (dim_ == 2) os << "x[" << extent_[1].lo << "," << extent_[1].hi << "]";
  os << " mask=" << mask_name(mask_spec_.kind);
  if (mask_spec_.kind == MaskKind::Disk)
    os << "(" << mask_spec_.center.x << "," << mask_spec_.center.y << ";" << mask_spec_.radius << ")";
  if (dim_ == 2) os << " stencil=" << static_cast<int>(stencil_);
  os << " nodes=" << node_count();
  return os.str();
}

// ---------------------------------------------------------------- fields

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) fail(ErrorCode::InvalidArgument, "field without grid");
  if (values_.size() != grid_->node_count())
    fail(ErrorCode::InvalidArgument, "field has " + std::to_string(values_.size()) +
                                         " values for " + std::to_string(grid_->node_count()) +
                                         " masked nodes");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteSample, "non-finite field value");
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const auto n = grid->node_count();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(Point)>& rule) {
  std::vector<double> values(grid->node_count());
  for (NodeId v = 0; v < values.size(); ++v) {
    values[v] = rule(grid->coord(v));
    if (!std::isfinite(values[v]))
      fail(ErrorCode::NonFiniteSample, "rule returned a non-finite value at node " + std::to_string(v));
  }
  return ScalarField(std::move(grid), std::move(values));
}

double ScalarField::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_->weight(i) * values_[i];
  return s;
}

double ScalarField::mean() const { return integral() / grid_->measure(); }

double ScalarField::l1_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_->weight(i) * std::abs(values_[i]);
  return s;
}

double ScalarField::l2_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_->weight(i) * values_[i] * values_[i];
  return std::sqrt(s);
}

double ScalarField::linf_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_layout(b.grid()))
    fail(ErrorCode::GridMismatch, "fields live on different grids");
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return ScalarField(a.grid_ptr(), std::move(out));
}

ScalarField operator+(const ScalarField& a, double shift) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v += shift;
  return ScalarField(a.grid_ptr(), std::move(out));
}

ScalarField operator-(const ScalarField& a) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v = -v;
  return ScalarField(a.grid_ptr(), std::move(out));
}

double linf_distance(const ScalarField& a, const ScalarField& b) {
  return (a - b).linf_norm();
}

double l2_distance(const ScalarField& a, const ScalarField& b) { return (a - b).l2_norm(); }

}  // namespace lipfit
