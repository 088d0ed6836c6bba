#pragma once

#include <cstddef>
#include <vector>

namespace lipfit {

// q(t) = a t^2 + b t + c
struct QuadPiece {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double t) const { return (a * t + b) * t + c; }
  double slope(double t) const { return 2.0 * a * t + b; }
};

// Convex, continuous piecewise-quadratic function on the real line, built for
// the forward recursion V <- (min_{|s|<=r} V(. + s)) + fidelity.
//
// Pieces are kept on two stacks split at a movable cut: the left stack holds
// the pieces left of the cut (innermost at the back), the right stack those
// right of it. Each stack stores its pieces in a lazy frame
//   actual(t) = stored(t - shift) + offset(t)
// so shifting a whole side or adding a quadratic everywhere is O(1); pieces
// only change frame when the cut moves across them.
class PiecewiseQuadratic {
 public:
  struct Minimum {
    double lo;  // argmin is the interval [lo, hi]; may be unbounded
    double hi;
    double value;
  };

  PiecewiseQuadratic();
  static PiecewiseQuadratic quadratic(double weight, double center);
  static PiecewiseQuadratic absolute(double weight, double center);

  // += weight/2 * (t - center)^2
  void add_quadratic(double weight, double center);
  // += weight * |t - center|
  void add_absolute(double weight, double center);
  // t -> min over |s| <= radius of f(t + s)
  void inf_convolve_box(double radius);

  Minimum minimum() const;
  double operator()(double t) const;

  std::size_t size() const { return left_.pieces.size() + right_.pieces.size(); }
  // Materialised view, left to right. breakpoints()[k] separates piece k
  // from piece k+1.
  std::vector<double> breakpoints() const;
  std::vector<QuadPiece> pieces() const;

  // Throws NonConvexValueFunction if a piece is concave, the function jumps
  // at a breakpoint, or one-sided slopes decrease across a breakpoint.
  void check_invariants(double rel_tol = 1e-9) const;

 private:
  struct Side {
    std::vector<QuadPiece> pieces;  // stored frame, outermost first
    // Stored end of each piece facing the cut: right end on the left side,
    // left end on the right side. The outermost pieces run to -inf / +inf.
    std::vector<double> ends;
    double shift = 0.0;
    QuadPiece offset;
  };

  QuadPiece actual(const Side& side, std::size_t k) const;
  QuadPiece stored(const Side& side, const QuadPiece& p) const;
  // Logical (left-to-right) access across both stacks.
  QuadPiece piece_at(std::size_t k) const;
  double lo_at(std::size_t k) const;
  double hi_at(std::size_t k) const;
  struct Located {
    Minimum min;
    std::size_t index;
  };
  Located locate_minimum() const;
  void cut_at(double t);
  double slope_tol() const { return 1e-12 * weight_scale_; }

  Side left_;
  Side right_;
  double weight_scale_ = 0.0;  // total weight added, scales slope round-off
};

}  // namespace lipfit
