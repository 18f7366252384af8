#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "navgaze/simworld.hpp"

namespace navgaze {

struct EpisodeResult {
  std::string scene;
  std::string query;
  std::string mode;
  std::uint64_t seed = 0;
  bool success = false;
  double shortest_length = 0.0;  // l_i
  double traveled = 0.0;         // p_i
  double dtg = 0.0;
  double heading_error_deg = 0.0;
  Pose2 final_pose;
  Pose2 optimal_pose;
  int collisions = 0;
  std::optional<std::string> failure;
  std::string trace_ref;
};

double compute_dtg(const Vec2& final_position, const Vec2& optimal_position);
double compute_dtg(const Pose2& final_pose, const Pose2& optimal_pose);

/// Fraction of successes. Throws Error(EmptyResults).
double compute_sr(std::span<const EpisodeResult> results);
/// (1/N) Σ S_i · l_i / max(l_i, p_i); an episode with l_i = p_i = 0 counts as 1.
/// Throws Error(EmptyResults).
double compute_spl(std::span<const EpisodeResult> results);
double mean_dtg(std::span<const EpisodeResult> results);

nlohmann::ordered_json to_json(const EpisodeResult& r);

}  // namespace navgaze
