#include "rcrl/worldmap.hpp"

#include <cmath>

namespace rcrl {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDynSpeed = 0.5;
constexpr double kClearance = 1.0;  // temp obstacles keep this off start/goal
constexpr double kMinStartGoalDist = 8.0;
}  // namespace

std::vector<Rect> template_walls(int template_id) {
  switch (template_id) {
    case 0:  // open room, two pillars
      return {{6.0, 8.0, 8.0, 12.0}, {12.0, 8.0, 14.0, 12.0}};
    case 1:  // S corridor
      return {{0.0, 6.5, 13.0, 7.5}, {7.0, 12.5, 20.0, 13.5}};
    case 2:  // four rooms, three doorways
      return {{9.5, 0.0, 10.5, 8.0},
              {9.5, 12.0, 10.5, 20.0},
              {0.0, 9.5, 4.0, 10.5},
              {16.0, 9.5, 20.0, 10.5}};
    case 3:  // scattered blocks
      return {{3.0, 3.0, 5.0, 5.0},   {14.0, 4.0, 16.0, 6.0}, {8.0, 14.0, 10.0, 16.0},
              {4.0, 11.0, 6.0, 13.0}, {13.0, 12.0, 16.0, 14.0}, {11.0, 6.0, 13.0, 8.0}};
    default:
      throw ConfigError("unknown map template");
  }
}

bool template_has_dynamics(int template_id) { return template_id == 0 || template_id == 2; }

namespace {

bool overlaps_wall(const std::vector<Rect>& walls, const Vec2& p, double r) {
  for (const Rect& w : walls)
    if (point_rect_distance(p, w) < r) return true;
  return false;
}

}  // namespace

GeneratedWorld generate_map(RngState& rng, int template_id, double robot_radius,
                            double grid_res) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    GeneratedWorld w;
    const int tid = template_id >= 0 ? template_id : static_cast<int>(rng.uniform_int(kNumTemplates));
    w.map.template_id = tid;
    w.map.walls = template_walls(tid);
    w.grid = OccupancyGrid::build(w.map.width, w.map.height, grid_res, w.map.walls,
                                  robot_radius);

    bool placed = false;
    for (int try_i = 0; try_i < 100 && !placed; ++try_i) {
      const Vec2 s{rng.uniform(0.0, w.map.width), rng.uniform(0.0, w.map.height)};
      const Vec2 g{rng.uniform(0.0, w.map.width), rng.uniform(0.0, w.map.height)};
      if ((s - g).norm() < kMinStartGoalDist) continue;
      int sx, sy, gx, gy;
      if (!w.grid.world_to_cell(s, sx, sy) || !w.grid.world_to_cell(g, gx, gy)) continue;
      if (!w.grid.free(sx, sy) || !w.grid.free(gx, gy)) continue;
      PlanResult plan = astar_plan(w.grid, sx, sy, gx, gy);
      if (!plan.found) continue;
      w.start = s;
      w.goal = g;
      w.path = ReferencePath::from_cells(plan.cells, w.grid);
      placed = true;
    }
    if (!placed) continue;  // regenerate

    const long n_temp = rng.uniform_int(7);
    for (long k = 0; k < n_temp; ++k) {
      for (int try_i = 0; try_i < 100; ++try_i) {
        Circle c;
        c.radius = rng.uniform(0.3, 0.6);
        c.center = {rng.uniform(c.radius, w.map.width - c.radius),
                    rng.uniform(c.radius, w.map.height - c.radius)};
        if ((c.center - w.start).norm() < c.radius + robot_radius + kClearance) continue;
        if ((c.center - w.goal).norm() < c.radius + robot_radius + kClearance) continue;
        if (overlaps_wall(w.map.walls, c.center, c.radius)) continue;
        if (template_has_dynamics(tid) && rng.uniform() < 0.5) {
          const double phi = rng.uniform(0.0, 2.0 * kPi);
          w.map.dynamics.push_back({c, {kDynSpeed * std::cos(phi), kDynSpeed * std::sin(phi)}});
        } else {
          w.map.statics.push_back(c);
        }
        break;
      }
    }
    return w;
  }
  throw PlanningError("map generation: no reachable start/goal");
}

Vec lidar_scan(const WorldMap& m, const Vec2& pos, double heading, int beams,
               double max_range) {
  const Rect bounds{0.0, 0.0, m.width, m.height};
  Vec out(beams);
  for (int i = 0; i < beams; ++i) {
    const double ang = heading + 2.0 * kPi * i / beams;
    const Vec2 dir{std::cos(ang), std::sin(ang)};
    double t = ray_rect_exit(pos, dir, bounds);
    if (t == kNoHit) t = 0.0;  // outside the workspace, degenerate pose
    for (const Rect& w : m.walls) t = std::min(t, ray_rect_enter(pos, dir, w));
    for (const Circle& c : m.statics) t = std::min(t, ray_circle_enter(pos, dir, c));
    for (const DynObstacle& d : m.dynamics) t = std::min(t, ray_circle_enter(pos, dir, d.c));
    out(i) = std::min(t, max_range);
  }
  return out;
}

void advance_dynamics(WorldMap& m, double dt) {
  for (DynObstacle& d : m.dynamics) {
    const double r = d.c.radius;
    const double nx = d.c.center.x() + d.vel.x() * dt;
    if (nx - r < 0.0 || nx + r > m.width ||
        overlaps_wall(m.walls, {nx, d.c.center.y()}, r))
      d.vel.x() = -d.vel.x();
    else
      d.c.center.x() = nx;
    const double ny = d.c.center.y() + d.vel.y() * dt;
    if (ny - r < 0.0 || ny + r > m.height ||
        overlaps_wall(m.walls, {d.c.center.x(), ny}, r))
      d.vel.y() = -d.vel.y();
    else
      d.c.center.y() = ny;
  }
}

bool collides(const WorldMap& m, const Vec2& pos, double radius) {
  if (pos.x() < radius || pos.x() > m.width - radius || pos.y() < radius ||
      pos.y() > m.height - radius)
    return true;
  if (overlaps_wall(m.walls, pos, radius)) return true;
  for (const Circle& c : m.statics)
    if ((pos - c.center).norm() < radius + c.radius) return true;
  for (const DynObstacle& d : m.dynamics)
    if ((pos - d.c.center).norm() < radius + d.c.radius) return true;
  return false;
}

}  // namespace rcrl
