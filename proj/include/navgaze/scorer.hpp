#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "navgaze/candidates.hpp"
#include "navgaze/geometry.hpp"
#include "navgaze/simworld.hpp"

namespace navgaze {

struct TaskQuery {
  std::string text;
  std::string label;
};

/// Scores are "higher is better"; `chosen` is a position into `scores`.
struct ScorerDecision {
  int chosen = -1;
  std::vector<double> scores;
  std::string rationale;
};

/// Argmax with ties to the lowest position. Empty scores give chosen = -1.
ScorerDecision make_decision(std::vector<double> scores, std::string rationale = {});

/// True when no score is positive (the scorer declines to pick).
bool abstains(const std::vector<double>& scores);

/// A candidate circle offered to the scorer in one frame.
struct CandidateOption {
  int marker = 0;
  Vec2 center = Vec2::Zero();
  Vec2 pixel = Vec2::Zero();
};

/// The pluggable decision maker. Each call returns one raw score per option.
class Scorer {
 public:
  virtual ~Scorer() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  virtual std::vector<double> score_images(const std::vector<Frame>& frames, const TaskQuery& query) = 0;
  virtual std::vector<double> score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                             const TaskQuery& query) = 0;
  virtual std::vector<double> score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                               const TaskQuery& query) = 0;
};

/// Ground-truth scorer backed by the scene description.
///  images: pixel count of segments carrying the query label
///  segments: 1 for a label match, 0 otherwise
///  candidates: cos(candidate→object, −operation_direction), minus 10 when the
///  straight line from the candidate to the object front crosses a primitive;
///  objects without an operation direction score −|clearance − (r_r + ε)|.
class OracleScorer final : public Scorer {
 public:
  explicit OracleScorer(SceneSpec scene, double robot_radius = 0.2, double epsilon = 0.01);
  [[nodiscard]] std::string name() const override { return "oracle"; }
  std::vector<double> score_images(const std::vector<Frame>& frames, const TaskQuery& query) override;
  std::vector<double> score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                     const TaskQuery& query) override;
  std::vector<double> score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                       const TaskQuery& query) override;

  [[nodiscard]] double candidate_score(const Vec2& center, const TaskQuery& query) const;

  static constexpr double kBlockedPenalty = 10.0;

 private:
  SceneSpec scene_;
  double robot_radius_;
  double epsilon_;
};

/// Whether the ground segment a→b passes through any primitive footprint,
/// sampled every `step` meters (the end point itself is not tested).
bool ground_segment_blocked(const SceneSpec& scene, const Vec2& a, const Vec2& b, double step = 0.01);

/// Wraps another scorer and appends one JSON line per decision:
/// {"stage", "options", "scores", "chosen", "seed"}.
class RecordingScorer final : public Scorer {
 public:
  RecordingScorer(Scorer& inner, std::ostream& log, std::uint64_t seed);
  [[nodiscard]] std::string name() const override { return inner_.name(); }
  std::vector<double> score_images(const std::vector<Frame>& frames, const TaskQuery& query) override;
  std::vector<double> score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                     const TaskQuery& query) override;
  std::vector<double> score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                       const TaskQuery& query) override;

 private:
  void record(const char* stage, const std::vector<int>& options, const std::vector<double>& scores);

  Scorer& inner_;
  std::ostream& log_;
  std::uint64_t seed_;
  std::mutex mu_;
};

/// Replays a decision log in order. Each call must match the recorded stage
/// and option list, otherwise Error(MalformedTrace); running past the end
/// raises Error(ScriptExhausted).
class ScriptedScorer final : public Scorer {
 public:
  explicit ScriptedScorer(std::istream& log);
  [[nodiscard]] std::string name() const override { return "scripted"; }
  std::vector<double> score_images(const std::vector<Frame>& frames, const TaskQuery& query) override;
  std::vector<double> score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                     const TaskQuery& query) override;
  std::vector<double> score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                       const TaskQuery& query) override;
  [[nodiscard]] std::size_t remaining() const noexcept { return entries_.size() - next_; }

 private:
  struct Entry {
    std::string stage;
    std::vector<int> options;
    std::vector<double> scores;
  };
  std::vector<double> replay(const char* stage, const std::vector<int>& options);

  std::vector<Entry> entries_;
  std::size_t next_ = 0;
  std::mutex mu_;
};

struct TargetSceneChoice {
  int frame_index = 0;   // Frame::index of the chosen frame
  std::size_t position = 0;  // position in the input list
  Vec2 goal = Vec2::Zero();
  ScorerDecision decision;
};

/// Throws Error(ObjectNotFound) when the scorer abstains.
TargetSceneChoice identify_target_scene(const std::vector<Frame>& frames, const TaskQuery& query, Scorer& scorer);

struct LocatedObject {
  int segment_id = 0;
  PointCloud points;  // world frame, all labelled Object
  ScorerDecision decision;
};

/// Throws Error(SegmentNotFound) when the frame has no segments or the scorer abstains.
LocatedObject locate_object_in_frame(const Frame& frame, const TaskQuery& query, Scorer& scorer);

struct Marker {
  int marker = 0;
  Vec2 pixel = Vec2::Zero();
  bool visible = false;
};

struct MarkerOverlay {
  int frame_index = 0;
  std::vector<Marker> markers;

  [[nodiscard]] std::size_t visible_count() const;
};

/// Projects each circle centre at ground level (z = 0). Visible means inside
/// the image and unobstructed from the camera centre.
MarkerOverlay project_markers(const Frame& frame, const CandidateSet& candidates, const SceneSpec& scene);

struct CandidateDecision {
  int marker = 0;
  std::vector<int> markers;  // options offered, aligned with decision.scores
  ScorerDecision decision;
};

/// Scores the visible markers only. Throws Error(NoVisibleCandidates).
CandidateDecision score_candidates(const Frame& frame, const MarkerOverlay& overlay, const CandidateSet& candidates,
                                   const TaskQuery& query, Scorer& scorer);

/// Seg-coloured rendering with marker numbers stamped at visible markers.
RgbImage annotate_frame(const Frame& frame, const MarkerOverlay& overlay);

}  // namespace navgaze
