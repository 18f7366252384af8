#include "navgaze/metrics.hpp"

#include <algorithm>

#include "navgaze/errors.hpp"

namespace navgaze {

double compute_dtg(const Vec2& final_position, const Vec2& optimal_position) {
  return (final_position - optimal_position).norm();
}

double compute_dtg(const Pose2& final_pose, const Pose2& optimal_pose) {
  return compute_dtg(final_pose.position, optimal_pose.position);
}

namespace {

void require_rows(std::span<const EpisodeResult> results) {
  if (results.empty()) throw Error(ErrorCode::EmptyResults, "no episode results");
}

}  // namespace

double compute_sr(std::span<const EpisodeResult> results) {
  require_rows(results);
  double sum = 0.0;
  for (const auto& r : results) sum += r.success ? 1.0 : 0.0;
  return sum / static_cast<double>(results.size());
}

double compute_spl(std::span<const EpisodeResult> results) {
  require_rows(results);
  double sum = 0.0;
  for (const auto& r : results) {
    if (!r.success) continue;
    const double denom = std::max(r.shortest_length, r.traveled);
    sum += denom > 0.0 ? r.shortest_length / denom : 1.0;
  }
  return sum / static_cast<double>(results.size());
}

double mean_dtg(std::span<const EpisodeResult> results) {
  require_rows(results);
  double sum = 0.0;
  for (const auto& r : results) sum += r.dtg;
  return sum / static_cast<double>(results.size());
}

nlohmann::ordered_json to_json(const EpisodeResult& r) {
  nlohmann::ordered_json j;
  j["scene"] = r.scene;
  j["query"] = r.query;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["shortest_length"] = r.shortest_length;
  j["traveled"] = r.traveled;
  j["dtg"] = r.dtg;
  j["heading_error_deg"] = r.heading_error_deg;
  j["final_pose"] = {r.final_pose.position.x(), r.final_pose.position.y(), r.final_pose.heading_deg};
  j["optimal_pose"] = {r.optimal_pose.position.x(), r.optimal_pose.position.y(), r.optimal_pose.heading_deg};
  j["collisions"] = r.collisions;
  j["failure"] = r.failure ? nlohmann::ordered_json(*r.failure) : nlohmann::ordered_json(nullptr);
  if (!r.trace_ref.empty()) j["trace"] = r.trace_ref;
  return j;
}

}  // namespace navgaze
