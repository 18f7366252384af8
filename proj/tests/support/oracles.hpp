#pragma once

// Independent reference implementations and fixture builders shared by the
// unit and acceptance tests. Everything here is exhaustive and slow on purpose.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "navgaze/candidates.hpp"
#include "navgaze/geometry.hpp"
#include "navgaze/navpath.hpp"
#include "navgaze/simworld.hpp"
#include "navgaze/taskgrid.hpp"

namespace oracle {

using navgaze::CellState;
using navgaze::Vec2;
using navgaze::Vec3;

inline double min_distance(const std::vector<Vec2>& pts, const Vec2& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) best = std::min(best, (p - q).norm());
  return best;
}

inline std::vector<Vec2> cells_where(const navgaze::TaskGrid& g, bool (*pred)(CellState)) {
  std::vector<Vec2> out;
  for (int r = 0; r < g.size(); ++r) {
    for (int c = 0; c < g.size(); ++c) {
      if (pred(g.at({c, r}))) out.push_back(g.cell_center({c, r}));
    }
  }
  return out;
}

struct CandidateViolations {
  int band = 0;
  int clearance = 0;
  int overlap = 0;
  int disk = 0;
  int support = 0;
  [[nodiscard]] int total() const { return band + clearance + overlap + disk + support; }
};

/// Re-checks every constraint on every circle by linear scans over all cells.
inline CandidateViolations verify_candidates(const navgaze::TaskGrid& g, const navgaze::CandidateSet& set,
                                             double rr, double eps, double ground_support = 0.05) {
  const auto object = cells_where(g, [](CellState s) { return s == CellState::QueriedObject; });
  const auto blocking = cells_where(g, [](CellState s) { return s == CellState::QueriedObject || s == CellState::Obstacle; });
  const auto ground = cells_where(g, [](CellState s) { return s == CellState::Ground; });
  CandidateViolations v;
  for (std::size_t i = 0; i < set.circles.size(); ++i) {
    const Vec2 c = set.circles[i].center;
    const double d = min_distance(object, c);
    if (d < rr / 2 || d > 1.5 * rr + eps) ++v.band;
    if (!(min_distance(blocking, c) > rr)) ++v.clearance;
    if (!(min_distance(ground, c) <= ground_support)) ++v.support;
    for (int r = 0; r < g.size(); ++r) {
      for (int col = 0; col < g.size(); ++col) {
        const CellState s = g.at({col, r});
        if ((s == CellState::Obstacle || s == CellState::QueriedObject) && (g.cell_center({col, r}) - c).norm() <= rr) {
          ++v.disk;
        }
      }
    }
    for (std::size_t j = i + 1; j < set.circles.size(); ++j) {
      if ((set.circles[j].center - c).norm() < 2 * rr) ++v.overlap;
    }
  }
  return v;
}

/// Random task grid: a blob object near the centre, some wall/box obstacles,
/// observed ground over most free cells and unseen patches.
inline navgaze::TaskGrid random_layout(std::uint64_t seed, int max_cells = 300) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double res = 0.01;
  const double rq = 0.15 + 0.35 * u(rng);
  const double half = std::min(rq + 1.0, max_cells * res / 2.0);
  navgaze::TaskGrid g(Vec2(u(rng) * 4 - 2, u(rng) * 4 - 2), half, res);
  const Vec2 c = g.center();

  std::vector<Vec2> object, obstacle, ground;
  const bool round = u(rng) < 0.5;
  const double ax = rq * (0.6 + 0.4 * u(rng));
  const double ay = rq * (0.6 + 0.4 * u(rng));
  struct Box { Vec2 lo, hi; };
  std::vector<Box> boxes;
  const int nbox = static_cast<int>(u(rng) * 4);
  for (int k = 0; k < nbox; ++k) {
    const double ang = u(rng) * 2 * navgaze::kPi;
    const double dist = rq + 0.3 + u(rng) * 0.6;
    const Vec2 bc = c + dist * Vec2(std::cos(ang), std::sin(ang));
    const Vec2 hs(0.05 + u(rng) * 0.4, 0.05 + u(rng) * 0.4);
    boxes.push_back({bc - hs, bc + hs});
  }
  const bool wall = u(rng) < 0.4;
  const double wall_y = c.y() + rq + 0.02;
  const double unseen_ang = u(rng) * 2 * navgaze::kPi;

  for (int r = 0; r < g.size(); ++r) {
    for (int col = 0; col < g.size(); ++col) {
      const Vec2 p = g.cell_center({col, r});
      const Vec2 rel = p - c;
      const bool in_obj = round ? rel.norm() <= rq : (std::abs(rel.x()) <= ax && std::abs(rel.y()) <= ay);
      if (in_obj) { object.push_back(p); continue; }
      bool obs = wall && p.y() >= wall_y && p.y() <= wall_y + 0.1;
      for (const auto& b : boxes) obs = obs || (p.x() >= b.lo.x() && p.x() <= b.hi.x() && p.y() >= b.lo.y() && p.y() <= b.hi.y());
      if (obs) { obstacle.push_back(p); continue; }
      if (wall && p.y() > wall_y + 0.1) continue;  // behind the wall stays unseen
      const double a = std::atan2(rel.y(), rel.x());
      if (std::abs(navgaze::signed_angle_deg(navgaze::rad2deg(unseen_ang), navgaze::rad2deg(a))) < 25.0) continue;
      if (u(rng) < 0.9) ground.push_back(p);
    }
  }
  g.rasterize(ground, CellState::Ground);
  g.rasterize(obstacle, CellState::Obstacle);
  g.rasterize(object, CellState::QueriedObject);
  return g;
}

/// Step counts (straight, diagonal) of an exhaustive Dijkstra on the same
/// 8-connected, no-corner-cutting lattice the planner uses.
inline std::optional<std::pair<int, int>> dijkstra_steps(const navgaze::NavGrid& grid, std::pair<int, int> s,
                                                          std::pair<int, int> t) {
  const auto& m = grid.map();
  const int w = m.width();
  const int h = m.height();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(w) * h, inf);
  std::vector<std::pair<int, int>> steps(dist.size(), {0, 0});
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const auto at = [w](int c, int r) { return static_cast<std::size_t>(r) * w + c; };
  dist[at(s.first, s.second)] = 0.0;
  pq.push({0.0, at(s.first, s.second)});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    const int c = static_cast<int>(i % w);
    const int r = static_cast<int>(i / w);
    for (int dc = -1; dc <= 1; ++dc) {
      for (int dr = -1; dr <= 1; ++dr) {
        if (dc == 0 && dr == 0) continue;
        const int nc = c + dc;
        const int nr = r + dr;
        if (grid.blocked(nc, nr)) continue;
        const bool diag = dc != 0 && dr != 0;
        if (diag && (grid.blocked(nc, r) || grid.blocked(c, nr))) continue;
        const auto [ss, dd] = steps[i];
        const std::pair<int, int> ns = diag ? std::pair{ss, dd + 1} : std::pair{ss + 1, dd};
        const double nd = ns.first + ns.second * std::sqrt(2.0);
        const std::size_t j = at(nc, nr);
        if (nd < dist[j]) {
          dist[j] = nd;
          steps[j] = ns;
          pq.push({nd, j});
        }
      }
    }
  }
  const std::size_t ti = at(t.first, t.second);
  if (dist[ti] == inf) return std::nullopt;
  return steps[ti];
}

/// Random 200×200 occupancy map: scattered rectangles and a few long walls with gaps.
inline navgaze::OccupancyMap random_map(std::uint64_t seed, int n = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(0, n - 1);
  navgaze::OccupancyMap m(Vec2(0, 0), n, n, 0.05);
  const int rects = 10 + static_cast<int>(rng() % 20);
  for (int k = 0; k < rects; ++k) {
    const int c0 = cell(rng);
    const int r0 = cell(rng);
    const int cw = 1 + static_cast<int>(rng() % 20);
    const int rh = 1 + static_cast<int>(rng() % 20);
    for (int r = r0; r < std::min(n, r0 + rh); ++r)
      for (int c = c0; c < std::min(n, c0 + cw); ++c) m.set_occupied(c, r, true);
  }
  const int walls = static_cast<int>(rng() % 4);
  for (int k = 0; k < walls; ++k) {
    const int at = cell(rng);
    const int gap = cell(rng);
    const bool vertical = rng() % 2 == 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(i - gap) <= 8) continue;
      if (vertical) m.set_occupied(at, i, true);
      else m.set_occupied(i, at, true);
    }
  }
  return m;
}

/// 700 noisy points on z = 0 plus 300 uniform outliers in a 2 m cube.
inline navgaze::PointCloud outlier_plane(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-1.0, 1.0);
  std::uniform_real_distribution<double> noise(-0.005, 0.005);
  navgaze::PointCloud cloud;
  for (int i = 0; i < 700; ++i) cloud.push_back(Vec3(xy(rng), xy(rng), noise(rng)));
  for (int i = 0; i < 300; ++i) cloud.push_back(Vec3(xy(rng), xy(rng), xy(rng)));
  return cloud;
}

}  // namespace oracle
