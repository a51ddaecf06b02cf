#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rcrl/geometry.hpp"

namespace rcrl {

struct OccupancyGrid {
  int nx = 0, ny = 0;
  double res = 0.25;
  std::vector<uint8_t> occ;  // ix + iy*nx

  bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
  bool occupied(int ix, int iy) const { return occ[static_cast<size_t>(ix) + iy * nx] != 0; }
  bool free(int ix, int iy) const { return in_bounds(ix, iy) && !occupied(ix, iy); }
  Vec2 cell_center(int ix, int iy) const { return {(ix + 0.5) * res, (iy + 0.5) * res}; }
  bool world_to_cell(const Vec2& p, int& ix, int& iy) const;

  // Cell occupied when its center lies inside an obstacle inflated by
  // `inflate`, or within `inflate` of the workspace boundary.
  static OccupancyGrid build(double width, double height, double res,
                             const std::vector<Rect>& rects, double inflate);
};

struct PlanResult {
  bool found = false;
  double cost = 0.0;  // in cell units: 1 per straight move, sqrt(2) per diagonal
  std::vector<std::pair<int, int>> cells;
};

// 8-connected A* with the octile heuristic. Diagonal moves are blocked when
// either adjacent orthogonal cell is occupied.
PlanResult astar_plan(const OccupancyGrid& g, int sx, int sy, int gx, int gy);

// Arc-length parameterized polyline with closest-point projection.
class ReferencePath {
 public:
  ReferencePath() = default;
  explicit ReferencePath(std::vector<Vec2> pts);
  static ReferencePath from_cells(const std::vector<std::pair<int, int>>& cells,
                                  const OccupancyGrid& g);

  bool empty() const { return pts_.empty(); }
  const std::vector<Vec2>& points() const { return pts_; }
  double total_length() const { return cum_.empty() ? 0.0 : cum_.back(); }

  // Arc length of the closest polyline point; ties go to the largest arc
  // length so the projection cannot slide backwards between near segments.
  double project(const Vec2& p, double* d_track) const;
  Vec2 point_at(double s) const;

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

}  // namespace rcrl
