#pragma once

#include "rcrl/grid.hpp"
#include "rcrl/mlp.hpp"
#include "rcrl/rng.hpp"

namespace rcrl {

struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DynObstacle {
  Circle c;
  Vec2 vel{0, 0};
};

struct WorldMap {
  double width = 20.0, height = 20.0;
  int template_id = 0;
  std::vector<Rect> walls;            // permanent
  std::vector<Circle> statics;        // temporary, static
  std::vector<DynObstacle> dynamics;  // temporary, moving
};

inline constexpr int kNumTemplates = 4;

std::vector<Rect> template_walls(int template_id);
bool template_has_dynamics(int template_id);  // maps 0 and 2

struct GeneratedWorld {
  WorldMap map;
  OccupancyGrid grid;  // permanent obstacles only, inflated by robot radius
  ReferencePath path;
  Vec2 start{0, 0}, goal{0, 0};
};

// Deterministic in rng: picks a template (when template_id < 0), samples a
// reachable start/goal pair over the permanent grid, plans the reference
// path, then scatters 0-6 temporary obstacles clear of start and goal.
GeneratedWorld generate_map(RngState& rng, int template_id, double robot_radius,
                            double grid_res = 0.25);

// Raw distances (meters, capped at max_range), beam i at bearing
// heading + 2*pi*i/beams.
Vec lidar_scan(const WorldMap& m, const Vec2& pos, double heading, int beams,
               double max_range);

// Constant-velocity motion with per-axis reflection off walls and the
// workspace boundary.
void advance_dynamics(WorldMap& m, double dt);

// Robot disc against walls, temporary obstacles, and the boundary.
bool collides(const WorldMap& m, const Vec2& pos, double radius);

}  // namespace rcrl
