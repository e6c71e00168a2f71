#pragma once

#include <cstddef>
#include <vector>

#include "adagradlab/problems.hpp"

namespace adagradlab::problems {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Alternating horizontal/vertical segment staircase on which the gradient
/// norm doubles at every corner. Segment t has length
/// a_t = eta * 2^t / sqrt((4^{t+1} - 1) / 3), strictly decreasing toward
/// eta * sqrt(3)/2. For eta > 9*sqrt(5)/(2*L1) every segment is longer than
/// 8/L1, which the three-region gradient definition needs; asserted at
/// construction.
class ZigzagGeometry {
 public:
  ZigzagGeometry(double eta, double L1, std::size_t segments = 64);

  double eta() const { return eta_; }
  double L1() const { return L1_; }
  std::size_t segments() const { return segments_; }

  /// Segment length a_t, t >= 1 (argument error at t = 0: S_0 is defined,
  /// a_0 is not).
  double a(std::size_t t) const;
  /// Partial sum S_k, k >= -1 (S_{-1} = S_0 = 0); pass k as signed index.
  double S(long long k) const;
  /// Objective value at the start corner of segment m, m >= 1.
  double f_at_segment_start(std::size_t m) const;

 private:
  double eta_;
  double L1_;
  std::size_t segments_;
  std::vector<double> a_;        // a_[t], t in [1, segments]
  std::vector<double> S_;        // S_[k+1] = S_k, k in [-1, segments]
  std::vector<double> f_start_;  // f_start_[m], m in [1, segments+1]

  friend Vec2 zigzag_gradient(Vec2 p, const ZigzagGeometry& geom, double tol);
  friend double zigzag_value(Vec2 p, const ZigzagGeometry& geom, double tol);
};

/// Closed-form a_t (same as geom.a(t)).
double zigzag_a(std::size_t t, const ZigzagGeometry& geom);

/// The bare closed form eta * 2^t / sqrt((4^{t+1} - 1)/3) for t >= 1,
/// usable without a constructed geometry (no threshold requirement).
double zigzag_segment_length(double eta, std::size_t t);

/// Piecewise gradient field on the segment union C. Only defined on C:
/// points farther than `tol` from every segment raise a domain error. The
/// field is continuous along C, so corner points (shared by two segments)
/// are unambiguous.
Vec2 zigzag_gradient(Vec2 p, const ZigzagGeometry& geom, double tol = 1e-9);

/// Piecewise-quadratic integral of the field along C, anchored at
/// f((0,0)) = 2/L1. Nonnegative on all of C (its minimum, exactly 0, sits
/// inside the first segment).
double zigzag_value(Vec2 p, const ZigzagGeometry& geom, double tol = 1e-9);

/// Point at arc distance `arc` from the origin along C (the first
/// `use_segments` segments; 0 means all cached segments).
Vec2 zigzag_point_at_arc(double arc, const ZigzagGeometry& geom);

/// Total arc length of the first `use_segments` cached segments.
double zigzag_arc_length(const ZigzagGeometry& geom, std::size_t use_segments = 0);

/// Wraps the geometry as a deterministic Problem (start point (0,0)).
Problem make_zigzag(double eta, double L1, std::size_t segments = 64);

}  // namespace adagradlab::problems
