#include "navgaze/navpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "navgaze/kernels.hpp"

namespace navgaze {

NavGrid::NavGrid(const OccupancyMap& map, double robot_radius, const PlannerOptions& opts)
    : map_(map), robot_radius_(robot_radius), inflation_radius_(robot_radius + opts.inflation_margin), opts_(opts) {
  blocked_ = opts.exec == Exec::Parallel ? kernels::inflate_omp(map_, inflation_radius_)
                                         : kernels::inflate_serial(map_, inflation_radius_);
}

std::optional<std::pair<int, int>> NavGrid::nearest_free(const Vec2& p, double max_radius) const {
  const double res = map_.resolution();
  const Vec2 rel = (p - map_.origin()) / res;
  const int reach = static_cast<int>(std::ceil(max_radius / res)) + 1;
  const int pc = static_cast<int>(std::floor(rel.x()));
  const int pr = static_cast<int>(std::floor(rel.y()));
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::pair<int, int>> out;
  for (int row = pr - reach; row <= pr + reach; ++row) {
    for (int col = pc - reach; col <= pc + reach; ++col) {
      if (blocked(col, row)) continue;
      const double d = (map_.cell_center(col, row) - p).norm();
      if (d > max_radius) continue;
      if (d < best) {
        best = d;
        out = std::pair{col, row};
      }
    }
  }
  return out;
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

struct OpenEntry {
  double f;
  double g;
  std::size_t idx;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;  // prefer deeper nodes on ties
    return idx > o.idx;
  }
};

}  // namespace

Path plan_path(const NavGrid& grid, const Vec2& start, const Vec2& goal) {
  const auto& map = grid.map();
  const double search = grid.options().goal_search_factor * grid.robot_radius();

  auto start_cell = map.cell_of(start);
  if (!start_cell) throw Error(ErrorCode::Unreachable, "start is outside the map");
  if (grid.blocked(start_cell->first, start_cell->second)) {
    start_cell = grid.nearest_free(start, search);
    if (!start_cell) throw Error(ErrorCode::Unreachable, "start is enclosed by obstacles");
  }
  auto goal_cell = map.cell_of(goal);
  if (!goal_cell || grid.blocked(goal_cell->first, goal_cell->second)) {
    goal_cell = grid.nearest_free(goal, search);
    if (!goal_cell) throw Error(ErrorCode::GoalTooDeep, "no free cell near the goal");
  }

  const int w = map.width();
  const int h = map.height();
  const auto idx_of = [w](int c, int r) { return static_cast<std::size_t>(r) * w + c; };
  const std::size_t s_idx = idx_of(start_cell->first, start_cell->second);
  const std::size_t g_idx = idx_of(goal_cell->first, goal_cell->second);
  const int gc = goal_cell->first;
  const int gr = goal_cell->second;

  std::vector<double> g(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(g.size(), -1);
  std::vector<char> closed(g.size(), 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;

  const auto heuristic = [&](int c, int r) { return std::hypot(static_cast<double>(c - gc), static_cast<double>(r - gr)); };
  g[s_idx] = 0.0;
  open.push({heuristic(start_cell->first, start_cell->second), 0.0, s_idx});

  static constexpr int kDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

  bool found = false;
  while (!open.empty()) {
    const OpenEntry cur = open.top();
    open.pop();
    if (closed[cur.idx]) continue;
    closed[cur.idx] = 1;
    if (cur.idx == g_idx) {
      found = true;
      break;
    }
    const int c = static_cast<int>(cur.idx % w);
    const int r = static_cast<int>(cur.idx / w);
    for (int k = 0; k < 8; ++k) {
      const int nc = c + kDc[k];
      const int nr = r + kDr[k];
      if (grid.blocked(nc, nr)) continue;
      const bool diag = k >= 4;
      if (diag && (grid.blocked(c + kDc[k], r) || grid.blocked(c, r + kDr[k]))) continue;
      const std::size_t n_idx = idx_of(nc, nr);
      if (closed[n_idx]) continue;
      const double ng = cur.g + (diag ? kSqrt2 : 1.0);
      if (ng < g[n_idx]) {
        g[n_idx] = ng;
        parent[n_idx] = static_cast<std::int64_t>(cur.idx);
        open.push({ng + heuristic(nc, nr), ng, n_idx});
      }
    }
  }
  if (!found) throw Error(ErrorCode::Unreachable, "no free connection between start and goal");

  std::vector<std::size_t> cells;
  for (auto i = static_cast<std::int64_t>(g_idx); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    cells.push_back(static_cast<std::size_t>(i));
  }
  std::reverse(cells.begin(), cells.end());

  Path path;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const int c = static_cast<int>(cells[i] % w);
    const int r = static_cast<int>(cells[i] / w);
    path.waypoints.push_back(map.cell_center(c, r));
    if (i > 0) {
      const int pc = static_cast<int>(cells[i - 1] % w);
      const int pr = static_cast<int>(cells[i - 1] / w);
      if (pc != c && pr != r) ++path.diagonal_steps;
      else ++path.straight_steps;
    }
  }
  path.length = map.resolution() * (path.straight_steps + path.diagonal_steps * kSqrt2);
  return path;
}

Path plan_path(const OccupancyMap& map, const Vec2& start, const Vec2& goal, double robot_radius,
               const PlannerOptions& opts) {
  return plan_path(NavGrid(map, robot_radius, opts), start, goal);
}

double polyline_length(const std::vector<Vec2>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

Vec2 point_at(const Path& path, double s) {
  if (path.waypoints.empty()) throw Error(ErrorCode::Precondition, "empty path");
  const auto& w = path.waypoints;
  if (s <= 0.0) return w.front();
  double acc = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double seg = (w[i] - w[i - 1]).norm();
    if (acc + seg >= s && seg > 0.0) return w[i - 1] + (w[i] - w[i - 1]) * ((s - acc) / seg);
    acc += seg;
  }
  return w.back();
}

Vec2 path_midpoint(const Path& path) {
  return point_at(path, polyline_length(path.waypoints) * 0.5);
}

std::vector<Action> rotate_to_face(const RobotState& state, const Vec2& target, int turn_deg) {
  const Vec2 rel = target - state.position;
  if (rel.norm() < 1e-12) return {};
  const double bearing = rad2deg(std::atan2(rel.y(), rel.x()));
  const double diff = signed_angle_deg(state.heading_deg, bearing);
  const auto turns = static_cast<std::size_t>(std::lround(std::abs(diff) / turn_deg));
  return std::vector<Action>(turns, diff > 0.0 ? Action::TurnLeft : Action::TurnRight);
}

FollowResult follow_path(const SceneSpec& scene, const RobotState& state, const Path& path, double stop_at,
                         const ActionConfig& cfg) {
  FollowResult out{state, {}, 0.0, 0};
  if (path.empty()) return out;
  const double total = polyline_length(path.waypoints);
  const double stop = std::clamp(stop_at, 0.0, total);
  const double step = cfg.forward_step;
  double progress = 0.0;
  int consecutive = 0;

  while (stop - progress > step * 0.5) {
    const Vec2 target = point_at(path, std::min(progress + step, stop));
    for (Action a : rotate_to_face(out.state, target, cfg.turn_deg)) {
      out.state = apply_action(scene, out.state, a, cfg).state;
      out.actions.push_back(a);
    }
    const auto res = apply_action(scene, out.state, Action::MoveForward, cfg);
    out.actions.push_back(Action::MoveForward);
    if (res.collided) {
      ++out.collisions;
      if (++consecutive >= 5) throw StuckError(out, "five consecutive blocked forward moves");
      continue;
    }
    consecutive = 0;
    out.state = res.state;
    out.traveled += step;
    progress = std::min(progress + step, stop);
  }
  return out;
}

}  // namespace navgaze
