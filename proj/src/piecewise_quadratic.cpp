#include "lipfit/piecewise_quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipfit/error.hpp"

namespace lipfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// q(t - s)
QuadPiece shifted(const QuadPiece& q, double s) {
  return {q.a, q.b - 2.0 * q.a * s, (q.a * s - q.b) * s + q.c};
}

QuadPiece operator+(const QuadPiece& p, const QuadPiece& q) { return {p.a + q.a, p.b + q.b, p.c + q.c}; }
QuadPiece operator-(const QuadPiece& p, const QuadPiece& q) { return {p.a - q.a, p.b - q.b, p.c - q.c}; }

// Minimiser of q over [lo, hi]; the interval itself when q is constant to
// within tol. Slopes built from sums and differences of weights rarely cancel
// to an exact zero.
PiecewiseQuadratic::Minimum minimize_on(const QuadPiece& q, double lo, double hi, double tol) {
  if (std::abs(q.a) <= tol && std::abs(q.b) <= tol) {
    const double at = std::isfinite(lo) ? lo : std::isfinite(hi) ? hi : 0.0;
    return {lo, hi, q(at)};
  }
  double t;
  if (q.a > tol)
    t = std::clamp(-q.b / (2.0 * q.a), lo, hi);
  else
    t = q.b > 0.0 ? lo : hi;
  if (std::isinf(t)) fail(ErrorCode::NonConvexValueFunction, "value function is not bounded below");
  return {t, t, q(t)};
}

double slope_toward(const QuadPiece& q, double t, double tol) {
  if (std::isinf(t)) return q.a > tol ? (t > 0 ? kInf : -kInf) : q.b;
  return q.slope(t);
}

// Ends are stored relative to a per-side shift and read back with rounding.
double frame_eps(double t, double s1, double s2) {
  return 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t) + std::abs(s1) + std::abs(s2));
}

}  // namespace

PiecewiseQuadratic::PiecewiseQuadratic() {
  right_.pieces.push_back({});
  right_.ends.push_back(-kInf);
}

PiecewiseQuadratic PiecewiseQuadratic::quadratic(double weight, double center) {
  PiecewiseQuadratic f;
  f.add_quadratic(weight, center);
  return f;
}

PiecewiseQuadratic PiecewiseQuadratic::absolute(double weight, double center) {
  PiecewiseQuadratic f;
  f.add_absolute(weight, center);
  return f;
}

QuadPiece PiecewiseQuadratic::actual(const Side& side, std::size_t k) const {
  return shifted(side.pieces[k], side.shift) + side.offset;
}

QuadPiece PiecewiseQuadratic::stored(const Side& side, const QuadPiece& p) const {
  return shifted(p - side.offset, -side.shift);
}

QuadPiece PiecewiseQuadratic::piece_at(std::size_t k) const {
  const std::size_t nl = left_.pieces.size();
  if (k < nl) return actual(left_, k);
  return actual(right_, right_.pieces.size() - 1 - (k - nl));
}

double PiecewiseQuadratic::lo_at(std::size_t k) const {
  const std::size_t nl = left_.pieces.size();
  if (k < nl) return k == 0 ? -kInf : left_.ends[k - 1] + left_.shift;
  // The cut is owned by the left side when it is non-empty.
  if (k == nl && nl > 0) return left_.ends[nl - 1] + left_.shift;
  return right_.ends[right_.pieces.size() - 1 - (k - nl)] + right_.shift;
}

double PiecewiseQuadratic::hi_at(std::size_t k) const {
  const std::size_t nl = left_.pieces.size();
  if (k < nl) return left_.ends[k] + left_.shift;
  const std::size_t j = right_.pieces.size() - 1 - (k - nl);
  return j == 0 ? kInf : right_.ends[j - 1] + right_.shift;
}

void PiecewiseQuadratic::add_quadratic(double weight, double center) {
  weight_scale_ += weight;
  const QuadPiece q{0.5 * weight, -weight * center, 0.5 * weight * center * center};
  left_.offset = left_.offset + q;
  right_.offset = right_.offset + q;
}

void PiecewiseQuadratic::add_absolute(double weight, double center) {
  weight_scale_ += weight;
  cut_at(center);
  left_.offset = left_.offset + QuadPiece{0.0, -weight, weight * center};
  right_.offset = right_.offset + QuadPiece{0.0, weight, -weight * center};
}

void PiecewiseQuadratic::cut_at(double t) {
  auto& L = left_;
  auto& R = right_;
  // Ends round-trip through two frames, so a piece just moved left may read
  // back an ulp past t; moving in both directions would split it twice.
  bool moved = false;
  const double eps = std::isfinite(t) ? frame_eps(t, L.shift, R.shift) : 0.0;
  while (!R.pieces.empty()) {
    const std::size_t j = R.pieces.size() - 1;
    const double lo = L.pieces.empty() ? R.ends[j] + R.shift : L.ends.back() + L.shift;
    const double hi = j == 0 ? kInf : R.ends[j - 1] + R.shift;
    if (hi <= t + eps) {
      const QuadPiece p = actual(R, j);
      R.pieces.pop_back();
      R.ends.pop_back();
      L.pieces.push_back(stored(L, p));
      L.ends.push_back(hi - L.shift);
      moved = true;
      continue;
    }
    if (lo < t - eps) {
      const QuadPiece p = actual(R, j);
      R.ends[j] = t - R.shift;
      L.pieces.push_back(stored(L, p));
      L.ends.push_back(t - L.shift);
      moved = true;
    }
    break;
  }
  while (!moved && !L.pieces.empty()) {
    const std::size_t k = L.pieces.size() - 1;
    const double hi = L.ends[k] + L.shift;
    const double lo = k == 0 ? -kInf : L.ends[k - 1] + L.shift;
    if (lo >= t - eps) {
      const QuadPiece p = actual(L, k);
      L.pieces.pop_back();
      L.ends.pop_back();
      R.pieces.push_back(stored(R, p));
      R.ends.push_back(lo - R.shift);
      continue;
    }
    if (hi > t + eps) {
      const QuadPiece p = actual(L, k);
      L.ends[k] = t - L.shift;
      R.pieces.push_back(stored(R, p));
      R.ends.push_back(t - R.shift);
    }
    break;
  }
  // Re-anchor an emptied side so its frame does not drift.
  if (L.pieces.empty()) {
    L.shift = 0.0;
    L.offset = {};
  }
  if (R.pieces.empty()) {
    R.shift = 0.0;
    R.offset = {};
  }
}

PiecewiseQuadratic::Located PiecewiseQuadratic::locate_minimum() const {
  const std::size_t n = size();
  std::size_t k = left_.pieces.empty() ? 0 : left_.pieces.size() - 1;
  const double tol = slope_tol();
  QuadPiece p = piece_at(k);
  if (slope_toward(p, hi_at(k), tol) < -tol) {
    while (k + 1 < n) {
      ++k;
      p = piece_at(k);
      if (slope_toward(p, hi_at(k), tol) >= -tol) break;
    }
  } else if (slope_toward(p, lo_at(k), tol) > tol) {
    while (k > 0) {
      --k;
      p = piece_at(k);
      if (slope_toward(p, lo_at(k), tol) <= tol) break;
    }
  }
  return {minimize_on(p, lo_at(k), hi_at(k), tol), k};
}

PiecewiseQuadratic::Minimum PiecewiseQuadratic::minimum() const { return locate_minimum().min; }

void PiecewiseQuadratic::inf_convolve_box(double radius) {
  const Minimum m = minimum();
  if (std::isfinite(m.lo)) {
    cut_at(m.lo);
  } else {
    cut_at(-kInf);
    while (!left_.pieces.empty()) {
      // everything left of a -inf argmin end lies in the argmin: drop it
      left_.pieces.pop_back();
      left_.ends.pop_back();
    }
  }
  if (m.hi > m.lo) {
    while (!right_.pieces.empty()) {
      const std::size_t j = right_.pieces.size() - 1;
      const double hi = j == 0 ? kInf : right_.ends[j - 1] + right_.shift;
      if (hi > m.hi) break;
      right_.pieces.pop_back();
      right_.ends.pop_back();
    }
  }
  if (left_.pieces.empty()) {
    left_.shift = 0.0;
    left_.offset = {};
  } else {
    left_.shift -= radius;
    left_.offset = shifted(left_.offset, -radius);
  }
  if (right_.pieces.empty()) {
    right_.shift = 0.0;
    right_.offset = {};
  } else {
    right_.shift += radius;
    right_.offset = shifted(right_.offset, radius);
  }
  const double flat_lo = std::isfinite(m.lo) ? m.lo - radius : -kInf;
  right_.pieces.push_back(stored(right_, QuadPiece{0.0, 0.0, m.value}));
  right_.ends.push_back(flat_lo - right_.shift);
}

double PiecewiseQuadratic::operator()(double t) const {
  const std::size_t n = size();
  for (std::size_t k = 0; k < n; ++k)
    if (t <= hi_at(k)) return piece_at(k)(t);
  return piece_at(n - 1)(t);
}

std::vector<double> PiecewiseQuadratic::breakpoints() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < size(); ++k) out.push_back(hi_at(k));
  return out;
}

std::vector<QuadPiece> PiecewiseQuadratic::pieces() const {
  std::vector<QuadPiece> out;
  for (std::size_t k = 0; k < size(); ++k) out.push_back(piece_at(k));
  return out;
}

void PiecewiseQuadratic::check_invariants(double rel_tol) const {
  const auto ps = pieces();
  const auto bs = breakpoints();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const auto& p = ps[k];
    if (p.a < -rel_tol * (1.0 + std::abs(p.b)))
      fail(ErrorCode::NonConvexValueFunction, "negative curvature on piece " + std::to_string(k));
  }
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const double t = bs[k];
    const auto& l = ps[k];
    const auto& r = ps[k + 1];
    const double scale = 1.0 + std::abs(l.a * t * t) + std::abs(l.b * t) + std::abs(l.c);
    if (std::abs(l(t) - r(t)) > rel_tol * scale)
      fail(ErrorCode::NonConvexValueFunction, "discontinuity at breakpoint " + std::to_string(k));
    const double sl = l.slope(t), sr = r.slope(t);
    if (sl > sr + rel_tol * (1.0 + std::abs(sl) + std::abs(sr)))
      fail(ErrorCode::NonConvexValueFunction, "slope decreases at breakpoint " + std::to_string(k));
    if (k > 0 && bs[k - 1] > t + rel_tol * (1.0 + std::abs(t)))
      fail(ErrorCode::NonConvexValueFunction, "breakpoints not increasing");
  }
}

}  // namespace lipfit
