#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "navgaze/geometry.hpp"
#include "navgaze/spatial_index.hpp"
#include "navgaze/taskgrid.hpp"

namespace navgaze {

/// A robot-sized disc the robot could stand in.
struct CandidateCircle {
  Vec2 center = Vec2::Zero();
  double radius = 0.2;
  int marker = 0;
  std::optional<double> score;
};

struct CandidateSet {
  std::vector<CandidateCircle> circles;
  double robot_radius = 0.2;
  double epsilon = 0.01;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const noexcept { return circles.size(); }
  [[nodiscard]] bool empty() const noexcept { return circles.empty(); }
  [[nodiscard]] const CandidateCircle* find(int marker) const;
};

/// Square lattice with spacing r_r/3 anchored at the grid's lower corner; the
/// last vertex on each axis is clipped onto the far edge.
std::vector<Vec2> seed_centers(const TaskGrid& grid, double robot_radius);

/// Keeps centres whose distance to the nearest object point lies in
/// [r_r/2, 3·r_r/2]. Throws Error(EmptyObjectIndex) for an empty index.
std::vector<Vec2> filter_by_band(std::span<const Vec2> centers, const SpatialIndex2D& object_index,
                                 double robot_radius, Exec exec = Exec::Parallel);

/// Pushes each centre within r_r of an obstacle along the ray from that
/// obstacle point through the centre until its clearance lies in
/// (r_r, r_r + epsilon]. Centres that leave `bounds` first, or sit exactly on
/// an obstacle point, are dropped. Clear centres are returned unchanged.
std::vector<Vec2> reposition(std::span<const Vec2> centers, const SpatialIndex2D& obstacle_index,
                             double robot_radius, double epsilon, const Eigen::AlignedBox2d& bounds);

/// Greedy chain: a seeded random first pick, then repeatedly the remaining
/// centre closest to the last retained one, discarding anything within 2·r_r
/// of a retained centre. Markers are 1..K in retention order.
CandidateSet select_non_overlapping(std::span<const Vec2> centers, double robot_radius, std::uint64_t seed);

struct CandidateOptions {
  double robot_radius = 0.2;
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  /// A candidate needs an observed Ground cell within this distance of its centre.
  double ground_support = 0.05;
  Exec exec = Exec::Parallel;
};

/// seed → band → reposition → feasibility (band with epsilon drift, clearance,
/// observed ground near the centre, disc over ground/unseen only) → non-overlap.
/// Throws Error(NoQueriedObject) or Error(NoFeasibleCandidate).
CandidateSet generate_candidates(const TaskGrid& grid, const CandidateOptions& opts);

/// Whether some Ground cell centre lies within `radius` of `center`.
bool ground_within(const TaskGrid& grid, const Vec2& center, double radius);

/// Whether every grid cell whose centre lies within `radius` of `center` is Ground or Unseen.
bool disk_on_free_cells(const TaskGrid& grid, const Vec2& center, double radius);

nlohmann::ordered_json to_json(const CandidateSet& set);
CandidateSet candidate_set_from_json(const nlohmann::json& j);

}  // namespace navgaze
