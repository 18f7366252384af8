#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "navgaze/candidates.hpp"
#include "navgaze/geometry.hpp"
#include "navgaze/metrics.hpp"
#include "navgaze/navpath.hpp"
#include "navgaze/scorer.hpp"
#include "navgaze/simworld.hpp"
#include "navgaze/taskgrid.hpp"

namespace navgaze {

enum class Mode { Full, DNT, OGD, NoRTS };

std::string_view to_string(Mode m);
/// Accepts "full", "dnt", "ogd", "norts" (any case). Throws Error(InvalidConfig).
Mode mode_from_string(std::string_view s);

struct PipelineConfig {
  double robot_radius = 0.2;
  double grid_resolution = 0.01;
  double alpha0_deg = 30.0;  // sweep yaw
  double alpha1_deg = 60.0;  // sweep and decision pitch
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  Mode mode = Mode::Full;
  double success_threshold = 0.5;
  double map_resolution = 0.05;
  double grid_margin = 1.0;
  double ground_support = 0.05;
  CameraConfig camera;
  ActionConfig actions;
  PlannerOptions planner;
  RansacParams ransac{500, 0.01, true, 30.0};
  Exec exec = Exec::Parallel;

  /// Throws Error(InvalidConfig) naming the offending field.
  void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& cfg);
/// Overlays the fields present in `j` on `base`.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base = {});

/// Append-only event log; one JSON object per line when serialized.
class EpisodeTrace {
 public:
  void add(const std::string& event, nlohmann::ordered_json data = nlohmann::ordered_json::object());
  [[nodiscard]] const std::vector<nlohmann::ordered_json>& events() const noexcept { return events_; }
  [[nodiscard]] std::string to_jsonl() const;
  /// Throws Error(MalformedTrace).
  static EpisodeTrace from_jsonl(const std::string& text);
  /// First event with the given name, or nullptr.
  [[nodiscard]] const nlohmann::ordered_json* find(const std::string& event) const;

 private:
  std::vector<nlohmann::ordered_json> events_;
};

/// Encodes actions one letter each: S F L R U D.
std::string encode_actions(const std::vector<Action>& actions);
std::vector<Action> decode_actions(const std::string& code);

/// Run-length code of the grid cells in row-major order: "<code>x<count>,..."
/// with the conventional cell codes (-1, 0, 1, 2).
std::string encode_grid(const TaskGrid& grid);
/// Rebuilds a grid from its geometry and run-length code. Throws Error(MalformedTrace).
TaskGrid decode_grid(const Vec2& center, double half_extent, double resolution, const std::string& code);

/// The embodied robot inside one episode: state, planner and bookkeeping.
class Agent {
 public:
  Agent(const SceneSpec& scene, const PipelineConfig& cfg, EpisodeTrace& trace);

  [[nodiscard]] const RobotState& state() const noexcept { return state_; }
  [[nodiscard]] double traveled() const noexcept { return traveled_; }
  [[nodiscard]] int collisions() const noexcept { return collisions_; }
  [[nodiscard]] const std::vector<Action>& actions() const noexcept { return actions_; }
  [[nodiscard]] const NavGrid& nav() const noexcept { return nav_; }
  [[nodiscard]] const SceneSpec& scene() const noexcept { return scene_; }

  void turn_to(const Vec2& target);
  /// Plans to `goal` and follows the path up to `fraction` of its length.
  /// Returns the planned path.
  Path go(const Vec2& goal, double fraction, const std::string& purpose);
  /// A camera frame from the current pose at the given pitch.
  [[nodiscard]] Frame capture(double pitch_deg, int index) const;
  void stop();

 private:
  void act(const std::vector<Action>& actions);

  const SceneSpec& scene_;
  const PipelineConfig& cfg_;
  EpisodeTrace& trace_;
  NavGrid nav_;
  RobotState state_;
  double traveled_ = 0.0;
  int collisions_ = 0;
  std::vector<Action> actions_;
};

struct SequentialOutcome {
  Vec2 target = Vec2::Zero();
  int marker = 0;
  bool fallback = false;
  /// World xy of object pixels seen in the decision frames.
  std::vector<Vec2> object_points;
};

/// Two-step decision: score from the current view, walk to the midpoint of
/// the path to the winner, face the object, re-project every candidate,
/// score again and walk to the new winner. With `one_step`, the first winner
/// is approached all the way and no second scoring happens. A step with no
/// visible marker falls back to the nearest candidate.
SequentialOutcome sequential_decision(Agent& agent, const CandidateSet& candidates, const Vec2& object_center,
                                      const TaskQuery& query, Scorer& scorer, const PipelineConfig& cfg,
                                      EpisodeTrace& trace, bool one_step = false);

/// Intermediate products kept for rendering.
struct EpisodeArtifacts {
  std::optional<TaskGrid> grid;
  std::optional<CandidateSet> candidates;  // world coordinates
  std::vector<Path> paths;
};

struct EpisodeOutput {
  EpisodeResult result;
  EpisodeTrace trace;
  EpisodeArtifacts artifacts;
};

/// Ground-truth goal: optimal_operation_pose, or nearest_operation_pose from
/// the start for objects without an operation direction.
Pose2 ground_truth_goal(const SceneSpec& scene, int object_id, const PipelineConfig& cfg);

/// Runs one episode in cfg.mode. Stage failures are recorded in the result,
/// never thrown.
EpisodeOutput run_episode(const SceneSpec& scene, const TaskQuery& query, Scorer& scorer, const PipelineConfig& cfg);

/// run_episode with the mode overridden.
EpisodeOutput run_ablation(const SceneSpec& scene, const TaskQuery& query, Scorer& scorer, PipelineConfig cfg,
                           Mode mode);

}  // namespace navgaze
