#include "rcrl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>

namespace rcrl {

bool OccupancyGrid::world_to_cell(const Vec2& p, int& ix, int& iy) const {
  ix = static_cast<int>(std::floor(p.x() / res));
  iy = static_cast<int>(std::floor(p.y() / res));
  return in_bounds(ix, iy);
}

OccupancyGrid OccupancyGrid::build(double width, double height, double res,
                                   const std::vector<Rect>& rects, double inflate) {
  OccupancyGrid g;
  g.res = res;
  g.nx = static_cast<int>(std::lround(width / res));
  g.ny = static_cast<int>(std::lround(height / res));
  g.occ.assign(static_cast<size_t>(g.nx) * g.ny, 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const Vec2 c = g.cell_center(ix, iy);
      bool hit = c.x() < inflate || c.x() > width - inflate || c.y() < inflate ||
                 c.y() > height - inflate;
      for (size_t k = 0; !hit && k < rects.size(); ++k)
        hit = rects[k].inflated(inflate).contains(c);
      if (hit) g.occ[static_cast<size_t>(ix) + static_cast<size_t>(iy) * g.nx] = 1;
    }
  return g;
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

double octile(int ax, int ay, int bx, int by) {
  const int dx = std::abs(ax - bx), dy = std::abs(ay - by);
  return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

struct QNode {
  double f;
  double h;
  int idx;
  bool operator>(const QNode& o) const {
    if (f != o.f) return f > o.f;
    if (h != o.h) return h > o.h;
    return idx > o.idx;
  }
};

}  // namespace

PlanResult astar_plan(const OccupancyGrid& g, int sx, int sy, int gx, int gy) {
  PlanResult out;
  if (!g.free(sx, sy) || !g.free(gx, gy)) return out;
  const int n = g.nx * g.ny;
  std::vector<double> best(n, kNoHit);
  std::vector<int> parent(n, -1);
  const auto id = [&](int x, int y) { return x + y * g.nx; };

  std::priority_queue<QNode, std::vector<QNode>, std::greater<QNode>> open;
  best[id(sx, sy)] = 0.0;
  open.push({octile(sx, sy, gx, gy), octile(sx, sy, gx, gy), id(sx, sy)});

  static const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  while (!open.empty()) {
    const QNode node = open.top();
    open.pop();
    const int cx = node.idx % g.nx, cy = node.idx / g.nx;
    const double gc = best[node.idx];
    if (node.f > gc + node.h) continue;  // stale entry
    if (cx == gx && cy == gy) break;
    for (int k = 0; k < 8; ++k) {
      const int nx2 = cx + dxs[k], ny2 = cy + dys[k];
      if (!g.free(nx2, ny2)) continue;
      const bool diag = dxs[k] != 0 && dys[k] != 0;
      if (diag && (!g.free(cx + dxs[k], cy) || !g.free(cx, cy + dys[k]))) continue;
      const double ng = gc + (diag ? kSqrt2 : 1.0);
      const int nid = id(nx2, ny2);
      if (ng < best[nid]) {
        best[nid] = ng;
        parent[nid] = node.idx;
        const double h = octile(nx2, ny2, gx, gy);
        open.push({ng + h, h, nid});
      }
    }
  }

  const int goal_id = id(gx, gy);
  if (best[goal_id] == kNoHit) return out;
  out.found = true;
  out.cost = best[goal_id];
  for (int cur = goal_id; cur != -1; cur = parent[cur])
    out.cells.emplace_back(cur % g.nx, cur / g.nx);
  std::reverse(out.cells.begin(), out.cells.end());
  return out;
}

ReferencePath::ReferencePath(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  cum_.resize(pts_.size());
  double s = 0.0;
  for (size_t i = 0; i < pts_.size(); ++i) {
    if (i > 0) s += (pts_[i] - pts_[i - 1]).norm();
    cum_[i] = s;
  }
}

ReferencePath ReferencePath::from_cells(const std::vector<std::pair<int, int>>& cells,
                                        const OccupancyGrid& g) {
  std::vector<Vec2> pts;
  pts.reserve(cells.size());
  for (const auto& [ix, iy] : cells) pts.push_back(g.cell_center(ix, iy));
  return ReferencePath(std::move(pts));
}

double ReferencePath::project(const Vec2& p, double* d_track) const {
  if (pts_.empty()) {
    if (d_track) *d_track = 0.0;
    return 0.0;
  }
  if (pts_.size() == 1) {
    if (d_track) *d_track = (p - pts_[0]).norm();
    return 0.0;
  }
  double best_d = kNoHit, best_s = 0.0;
  for (size_t i = 0; i + 1 < pts_.size(); ++i) {
    double u = 0.0;
    const Vec2 q = closest_point_on_segment(p, pts_[i], pts_[i + 1], &u);
    const double d = (p - q).norm();
    const double s = cum_[i] + u * (cum_[i + 1] - cum_[i]);
    if (d < best_d - 1e-9 || (d < best_d + 1e-9 && s > best_s)) {
      best_d = std::min(d, best_d);
      best_s = s;
    }
  }
  if (d_track) *d_track = best_d;
  return best_s;
}

Vec2 ReferencePath::point_at(double s) const {
  if (pts_.empty()) return {0, 0};
  if (s <= 0.0) return pts_.front();
  if (s >= total_length()) return pts_.back();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  const size_t i = static_cast<size_t>(it - cum_.begin());  // cum_[i-1] <= s < cum_[i]
  const double seg = cum_[i] - cum_[i - 1];
  const double u = seg > 0.0 ? (s - cum_[i - 1]) / seg : 0.0;
  return pts_[i - 1] + u * (pts_[i] - pts_[i - 1]);
}

void ReferencePath::save(std::ostream& os) const {
  const uint32_t n = static_cast<uint32_t>(pts_.size());
  os.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const Vec2& p : pts_) {
    const double xy[2] = {p.x(), p.y()};
    os.write(reinterpret_cast<const char*>(xy), sizeof(xy));
  }
}

void ReferencePath::load(std::istream& is) {
  uint32_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof(n));
  std::vector<Vec2> pts(n);
  for (uint32_t i = 0; i < n; ++i) {
    double xy[2];
    is.read(reinterpret_cast<char*>(xy), sizeof(xy));
    pts[i] = {xy[0], xy[1]};
  }
  if (!is) throw std::runtime_error("reference path: truncated stream");
  *this = ReferencePath(std::move(pts));
}

}  // namespace rcrl
