#include "rcrl/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rcrl {

double point_rect_distance(const Vec2& p, const Rect& r) {
  const double dx = std::max({r.xmin - p.x(), 0.0, p.x() - r.xmax});
  const double dy = std::max({r.ymin - p.y(), 0.0, p.y() - r.ymax});
  return std::hypot(dx, dy);
}

namespace {

// Per-axis slab interval [t0, t1]; false when the ray misses the slab.
bool axis_slab(double o, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return o >= lo && o <= hi;
  double ta = (lo - o) / d;
  double tb = (hi - o) / d;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

}  // namespace

double ray_rect_enter(const Vec2& origin, const Vec2& dir, const Rect& r) {
  double t0 = -kNoHit, t1 = kNoHit;
  if (!axis_slab(origin.x(), dir.x(), r.xmin, r.xmax, t0, t1)) return kNoHit;
  if (!axis_slab(origin.y(), dir.y(), r.ymin, r.ymax, t0, t1)) return kNoHit;
  if (t1 < 0.0) return kNoHit;
  return std::max(t0, 0.0);
}

double ray_rect_exit(const Vec2& origin, const Vec2& dir, const Rect& r) {
  if (!r.contains(origin)) return kNoHit;
  double t0 = -kNoHit, t1 = kNoHit;
  if (!axis_slab(origin.x(), dir.x(), r.xmin, r.xmax, t0, t1)) return kNoHit;
  if (!axis_slab(origin.y(), dir.y(), r.ymin, r.ymax, t0, t1)) return kNoHit;
  return std::max(t1, 0.0);
}

double ray_circle_enter(const Vec2& origin, const Vec2& dir, const Circle& c) {
  const Vec2 oc = c.center - origin;
  const double proj = oc.dot(dir);
  const double d2 = dir.squaredNorm();
  // t^2*d2 - 2t*proj + |oc|^2 - r^2 = 0
  const double disc = proj * proj - d2 * (oc.squaredNorm() - c.radius * c.radius);
  if (disc < 0.0) return kNoHit;
  const double sq = std::sqrt(disc);
  const double t1 = (proj - sq) / d2;
  const double t2 = (proj + sq) / d2;
  if (t2 < 0.0) return kNoHit;
  return t1 >= 0.0 ? t1 : 0.0;  // origin inside the circle hits immediately
}

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double* u_out) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double u = 0.0;
  if (len2 > 0.0) u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  if (u_out) *u_out = u;
  return a + u * ab;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - closest_point_on_segment(p, a, b, nullptr)).norm();
}

}  // namespace rcrl
