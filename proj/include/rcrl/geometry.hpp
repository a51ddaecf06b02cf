#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace rcrl {

using Vec2 = Eigen::Vector2d;

inline constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;

  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  Rect inflated(double by) const { return {xmin - by, ymin - by, xmax + by, ymax + by}; }
};

struct Circle {
  Vec2 center{0, 0};
  double radius = 0;
};

// Distance from p to the closest point of the rect (0 when inside).
double point_rect_distance(const Vec2& p, const Rect& r);

// Smallest t >= 0 with origin + t*dir on the rect boundary or interior
// (slab method; an origin inside the rect yields t = 0). kNoHit on miss.
// dir need not be normalized but here always is.
double ray_rect_enter(const Vec2& origin, const Vec2& dir, const Rect& r);

// Largest t >= 0 still inside the rect, for rays cast from inside (the
// workspace boundary case). kNoHit when the origin is outside.
double ray_rect_exit(const Vec2& origin, const Vec2& dir, const Rect& r);

// Smallest t >= 0 hitting the circle. kNoHit on miss.
double ray_circle_enter(const Vec2& origin, const Vec2& dir, const Circle& c);

// Closest point of segment [a,b]; u_out gets the clamped parameter in [0,1].
Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b, double* u_out);

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace rcrl
