#include "adagradlab/zigzag.hpp"

#include <cmath>
#include <memory>
#include <limits>

namespace adagradlab::problems {

namespace {

// Stable segment length: a_t = eta * 2^t / sqrt((4^{t+1}-1)/3)
//                            = eta * sqrt(3) / sqrt(4 - 4^{-t}).
double segment_length(double eta, std::size_t t) {
  return eta * std::sqrt(3.0) / std::sqrt(4.0 - std::ldexp(1.0, -2 * static_cast<int>(t)));
}

}  // namespace

ZigzagGeometry::ZigzagGeometry(double eta, double L1, std::size_t segments)
    : eta_(eta), L1_(L1), segments_(segments) {
  require(eta > 0.0, "ZigzagGeometry: eta must be positive");
  require(L1 > 0.0, "ZigzagGeometry: L1 must be positive");
  require(segments >= 2 && segments <= 1000, "ZigzagGeometry: segments must be in [2, 1000]");
  require(eta > 9.0 * std::sqrt(5.0) / (2.0 * L1),
          "ZigzagGeometry: requires eta > 9*sqrt(5)/(2*L1)");

  a_.assign(segments + 1, 0.0);
  S_.assign(segments + 2, 0.0);  // S_[k+1] = S_k, S_{-1} = S_0 = 0
  f_start_.assign(segments + 2, 0.0);
  f_start_[1] = 2.0 / L1;
  for (std::size_t t = 1; t <= segments; ++t) {
    a_[t] = segment_length(eta, t);
    if (!(a_[t] > 8.0 / L1))
      throw std::logic_error("ZigzagGeometry: segment shorter than 8/L1");
    S_[t + 1] = S_[t - 1] + a_[t];
    f_start_[t + 1] = f_start_[t] + std::ldexp(2.0, static_cast<int>(t)) / L1;
  }
}

double ZigzagGeometry::a(std::size_t t) const {
  require(t >= 1, "zigzag a_t: t must be >= 1 (a_0 is not defined)");
  require(t <= segments_, "zigzag a_t: beyond cached horizon");
  return a_[t];
}

double ZigzagGeometry::S(long long k) const {
  require(k >= -1, "zigzag S_k: k must be >= -1");
  require(k <= static_cast<long long>(segments_), "zigzag S_k: beyond cached horizon");
  return S_[static_cast<std::size_t>(k + 1)];
}

double ZigzagGeometry::f_at_segment_start(std::size_t m) const {
  require(m >= 1 && m <= segments_ + 1, "zigzag f_start: segment out of range");
  return f_start_[m];
}

double zigzag_a(std::size_t t, const ZigzagGeometry& geom) { return geom.a(t); }

double zigzag_segment_length(double eta, std::size_t t) {
  require(eta > 0.0, "zigzag segment length: eta must be positive");
  require(t >= 1, "zigzag a_t: t must be >= 1 (a_0 is not defined)");
  return segment_length(eta, t);
}

namespace {

struct Located {
  std::size_t m;  // segment index, 1-based
  double u;       // arc offset from the segment start, clamped to [0, a_m]
};

// Segment m runs along x (m odd) or y (m even); its fixed coordinate is
// S_{m-1} and the moving coordinate goes from S_{m-2} to S_m.
//
// Membership is resolved at the tolerance: offsets below tol from a
// segment start collapse onto the corner, so a junction point (and any
// point within tol of it) takes the value prescribed at the start of the
// next segment. Without the snap, rounding-level overshoot past a corner
// would pick up a cross-axis gradient component that the walk amplifies
// geometrically.
Located locate(Vec2 p, const ZigzagGeometry& geom, double tol) {
  Located best{0, 0.0};
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t m = 1; m <= geom.segments(); ++m) {
    const bool horizontal = (m % 2 == 1);
    const double fixed = geom.S(static_cast<long long>(m) - 1);
    const double lo = geom.S(static_cast<long long>(m) - 2);
    const double hi = geom.S(static_cast<long long>(m));
    const double mv = horizontal ? p.x : p.y;
    const double fx = horizontal ? p.y : p.x;
    const double overshoot = std::max({0.0, lo - mv, mv - hi});
    const double dist = std::hypot(fx - fixed, overshoot);
    if (dist < best_dist) {
      best_dist = dist;
      best = {m, std::clamp(mv - lo, 0.0, hi - lo)};
    }
  }
  if (!(best_dist <= tol))
    throw std::domain_error("zigzag: point is not on the segment union C");
  if (best.u < tol) best.u = 0.0;
  if (best.m < geom.segments() && best.u > geom.a(best.m) - tol)
    best = {best.m + 1, 0.0};
  return best;
}

}  // namespace

Vec2 zigzag_gradient(Vec2 p, const ZigzagGeometry& geom, double tol) {
  const Located loc = locate(p, geom, tol);
  const double lam = geom.L1();
  const double A = std::ldexp(1.0, static_cast<int>(loc.m));  // 2^m
  double g_mv, g_pp;  // along the segment / along the next segment's axis
  if (loc.u < 4.0 / lam) {
    g_mv = -A + lam * loc.u * (A / 2.0);
    g_pp = -lam * loc.u * (A / 2.0);
  } else if (loc.u < 8.0 / lam) {
    const double s = loc.u - 4.0 / lam;
    g_mv = A - lam * s * (A / 4.0);
    g_pp = -2.0 * A;
  } else {
    g_mv = 0.0;
    g_pp = -2.0 * A;
  }
  return (loc.m % 2 == 1) ? Vec2{g_mv, g_pp} : Vec2{g_pp, g_mv};
}

double zigzag_value(Vec2 p, const ZigzagGeometry& geom, double tol) {
  const Located loc = locate(p, geom, tol);
  const double lam = geom.L1();
  const double A = std::ldexp(1.0, static_cast<int>(loc.m));
  const double f0 = geom.f_at_segment_start(loc.m);
  if (loc.u < 4.0 / lam) {
    return f0 - A * loc.u + lam * loc.u * loc.u * (A / 4.0);
  }
  if (loc.u < 8.0 / lam) {
    const double s = loc.u - 4.0 / lam;
    return f0 + A * s - lam * s * s * (A / 8.0);
  }
  return f0 + 2.0 * A / lam;
}

double zigzag_arc_length(const ZigzagGeometry& geom, std::size_t use_segments) {
  if (use_segments == 0 || use_segments > geom.segments()) use_segments = geom.segments();
  double total = 0.0;
  for (std::size_t m = 1; m <= use_segments; ++m) total += geom.a(m);
  return total;
}

Vec2 zigzag_point_at_arc(double arc, const ZigzagGeometry& geom) {
  require(arc >= 0.0, "zigzag arc position must be nonnegative");
  for (std::size_t m = 1; m <= geom.segments(); ++m) {
    const double len = geom.a(m);
    if (arc < len || m == geom.segments()) {
      const double u = std::min(arc, len);
      const double fixed = geom.S(static_cast<long long>(m) - 1);
      const double lo = geom.S(static_cast<long long>(m) - 2);
      return (m % 2 == 1) ? Vec2{lo + u, fixed} : Vec2{fixed, lo + u};
    }
    arc -= len;
  }
  throw std::invalid_argument("zigzag arc position beyond cached horizon");
}

Problem make_zigzag(double eta, double L1, std::size_t segments) {
  auto geom = std::make_shared<ZigzagGeometry>(eta, L1, segments);

  Problem p;
  p.name = "zigzag";
  p.dim = 2;
  p.value = [geom](std::span<const double> w) {
    require_same_dim(w.size(), 2, "zigzag value");
    return zigzag_value({w[0], w[1]}, *geom);
  };
  p.full_gradient = [geom](std::span<const double> w) {
    require_same_dim(w.size(), 2, "zigzag gradient");
    Vec2 g = zigzag_gradient({w[0], w[1]}, *geom);
    return Vec{g.x, g.y};
  };
  p.support.push_back({p.full_gradient, 1.0});
  p.oracle = [grad = p.full_gradient](std::span<const double> w, std::mt19937_64&) {
    return grad(w);
  };
  p.constants.L0 = 0.0;
  p.constants.L1 = L1;
  p.constants.D0 = 0.0;
  p.constants.D1 = 1.0;
  p.constants.f_star = 0.0;
  p.constants.coordinate_affine_holds = true;
  p.initial_point = Vec{0.0, 0.0};
  return p;
}

}  // namespace adagradlab::problems
