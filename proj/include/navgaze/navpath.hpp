#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "navgaze/errors.hpp"
#include "navgaze/simworld.hpp"

namespace navgaze {

struct PlannerOptions {
  /// Extra growth on top of the robot radius when inflating occupied cells.
  double inflation_margin = 0.075;
  /// Blocked goals fall back to the nearest free cell within this many robot radii.
  double goal_search_factor = 3.0;
  Exec exec = Exec::Parallel;
};

/// Occupancy map with every occupied cell centre grown by r_r + margin.
class NavGrid {
 public:
  NavGrid(const OccupancyMap& map, double robot_radius, const PlannerOptions& opts = {});

  [[nodiscard]] const OccupancyMap& map() const noexcept { return map_; }
  [[nodiscard]] double robot_radius() const noexcept { return robot_radius_; }
  [[nodiscard]] double inflation_radius() const noexcept { return inflation_radius_; }
  [[nodiscard]] const PlannerOptions& options() const noexcept { return opts_; }
  [[nodiscard]] bool blocked(int col, int row) const {
    return !map_.in_bounds(col, row) || blocked_[map_.index(col, row)] != 0;
  }
  [[nodiscard]] const std::vector<std::uint8_t>& blocked_cells() const noexcept { return blocked_; }

  /// Free cell whose centre is nearest to p within max_radius; ties go to the
  /// lowest row-major index.
  [[nodiscard]] std::optional<std::pair<int, int>> nearest_free(const Vec2& p, double max_radius) const;

 private:
  OccupancyMap map_;
  double robot_radius_;
  double inflation_radius_;
  PlannerOptions opts_;
  std::vector<std::uint8_t> blocked_;
};

struct Path {
  std::vector<Vec2> waypoints;
  double length = 0.0;  // meters
  int straight_steps = 0;
  int diagonal_steps = 0;

  [[nodiscard]] bool empty() const noexcept { return waypoints.empty(); }
};

/// 8-connected A* (no corner cutting) with a Euclidean heuristic. Waypoints
/// are cell centres. A blocked start snaps to the nearest free cell within the
/// goal search radius; a blocked goal falls back the same way.
/// Throws Error(Unreachable) or Error(GoalTooDeep).
Path plan_path(const NavGrid& grid, const Vec2& start, const Vec2& goal);
Path plan_path(const OccupancyMap& map, const Vec2& start, const Vec2& goal, double robot_radius,
               const PlannerOptions& opts = {});

/// Point at arc length s along the polyline (clamped to [0, length]).
Vec2 point_at(const Path& path, double s);
Vec2 path_midpoint(const Path& path);
double polyline_length(const std::vector<Vec2>& pts);

/// Shortest run of single-quantum turns that brings the heading within half a
/// quantum of the bearing to `target`.
std::vector<Action> rotate_to_face(const RobotState& state, const Vec2& target, int turn_deg = 1);

struct FollowResult {
  RobotState state;
  std::vector<Action> actions;
  double traveled = 0.0;
  int collisions = 0;
};

/// Raised after five consecutive blocked forward moves; carries the partial result.
class StuckError : public Error {
 public:
  StuckError(FollowResult partial, const std::string& what)
      : Error(ErrorCode::Stuck, what), partial_(std::move(partial)) {}
  [[nodiscard]] const FollowResult& partial() const noexcept { return partial_; }

 private:
  FollowResult partial_;
};

/// Greedy controller: face the path point one step ahead, move forward, repeat
/// until the arc-length progress reaches stop_at (or the path end).
FollowResult follow_path(const SceneSpec& scene, const RobotState& state, const Path& path, double stop_at,
                         const ActionConfig& cfg = {});

}  // namespace navgaze
