#include "navgaze/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "navgaze/errors.hpp"

namespace navgaze {

ScorerDecision make_decision(std::vector<double> scores, std::string rationale) {
  ScorerDecision d;
  d.scores = std::move(scores);
  d.rationale = std::move(rationale);
  for (std::size_t i = 0; i < d.scores.size(); ++i) {
    if (d.chosen < 0 || d.scores[i] > d.scores[static_cast<std::size_t>(d.chosen)]) d.chosen = static_cast<int>(i);
  }
  return d;
}

bool abstains(const std::vector<double>& scores) {
  return std::none_of(scores.begin(), scores.end(), [](double s) { return s > 0.0; });
}

bool ground_segment_blocked(const SceneSpec& scene, const Vec2& a, const Vec2& b, double step) {
  const double len = (b - a).norm();
  const int n = static_cast<int>(std::ceil(len / step));
  for (int i = 0; i < n; ++i) {
    const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
    for (const auto& prim : scene.primitives) {
      if (prim.signed_footprint_distance(p) < -1e-9) return true;
    }
  }
  return false;
}

OracleScorer::OracleScorer(SceneSpec scene, double robot_radius, double epsilon)
    : scene_(std::move(scene)), robot_radius_(robot_radius), epsilon_(epsilon) {}

std::vector<double> OracleScorer::score_images(const std::vector<Frame>& frames, const TaskQuery& query) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    std::size_t count = 0;
    for (const int id : f.segment_ids()) {
      if (scene_.label_of(id) == query.label) count += f.pixel_count(id);
    }
    out.push_back(static_cast<double>(count));
  }
  return out;
}

std::vector<double> OracleScorer::score_segments(const Frame&, const std::vector<int>& segment_ids,
                                                 const TaskQuery& query) {
  std::vector<double> out;
  for (const int id : segment_ids) out.push_back(scene_.label_of(id) == query.label ? 1.0 : 0.0);
  return out;
}

double OracleScorer::candidate_score(const Vec2& center, const TaskQuery& query) const {
  const Primitive* obj = scene_.find_label(query.label);
  if (!obj) return 0.0;
  if (!obj->operation_direction) {
    return -std::abs(obj->signed_footprint_distance(center) - (robot_radius_ + epsilon_));
  }
  const Vec2 op = obj->operation_direction->normalized();
  const Vec2 to_obj = obj->center2d() - center;
  const double n = to_obj.norm();
  double score = n > 0.0 ? to_obj.dot(-op) / n : -1.0;
  const Vec2 front = obj->center2d() + op * obj->boundary_along(op);
  if (ground_segment_blocked(scene_, center, front)) score -= kBlockedPenalty;
  return score;
}

std::vector<double> OracleScorer::score_candidates(const Frame&, const std::vector<CandidateOption>& options,
                                                   const TaskQuery& query) {
  std::vector<double> out;
  out.reserve(options.size());
  for (const auto& o : options) out.push_back(candidate_score(o.center, query));
  return out;
}

RecordingScorer::RecordingScorer(Scorer& inner, std::ostream& log, std::uint64_t seed)
    : inner_(inner), log_(log), seed_(seed) {}

void RecordingScorer::record(const char* stage, const std::vector<int>& options, const std::vector<double>& scores) {
  const auto d = make_decision(scores);
  nlohmann::ordered_json j;
  j["stage"] = stage;
  j["options"] = options;
  j["scores"] = scores;
  j["chosen"] = d.chosen < 0 ? nlohmann::ordered_json(nullptr)
                             : nlohmann::ordered_json(options[static_cast<std::size_t>(d.chosen)]);
  j["seed"] = seed_;
  std::lock_guard lock(mu_);
  log_ << j.dump() << '\n';
}

std::vector<double> RecordingScorer::score_images(const std::vector<Frame>& frames, const TaskQuery& query) {
  auto scores = inner_.score_images(frames, query);
  std::vector<int> ids;
  for (const auto& f : frames) ids.push_back(f.index);
  record("select_image", ids, scores);
  return scores;
}

std::vector<double> RecordingScorer::score_segments(const Frame& frame, const std::vector<int>& segment_ids,
                                                    const TaskQuery& query) {
  auto scores = inner_.score_segments(frame, segment_ids, query);
  record("select_segment", segment_ids, scores);
  return scores;
}

std::vector<double> RecordingScorer::score_candidates(const Frame& frame, const std::vector<CandidateOption>& options,
                                                      const TaskQuery& query) {
  auto scores = inner_.score_candidates(frame, options, query);
  std::vector<int> ids;
  for (const auto& o : options) ids.push_back(o.marker);
  record("score_candidates", ids, scores);
  return scores;
}

ScriptedScorer::ScriptedScorer(std::istream& log) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(log, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Entry e;
      e.stage = j.at("stage").get<std::string>();
      e.options = j.at("options").get<std::vector<int>>();
      e.scores = j.at("scores").get<std::vector<double>>();
      entries_.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::MalformedTrace, "decision log line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
}

std::vector<double> ScriptedScorer::replay(const char* stage, const std::vector<int>& options) {
  std::lock_guard lock(mu_);
  if (next_ >= entries_.size()) throw Error(ErrorCode::ScriptExhausted, "decision log has no more entries");
  const Entry& e = entries_[next_++];
  if (e.stage != stage || e.options != options) {
    throw Error(ErrorCode::MalformedTrace, "decision log entry " + std::to_string(next_) + " does not match a " +
                                               stage + " request");
  }
  return e.scores;
}

std::vector<double> ScriptedScorer::score_images(const std::vector<Frame>& frames, const TaskQuery&) {
  std::vector<int> ids;
  for (const auto& f : frames) ids.push_back(f.index);
  return replay("select_image", ids);
}

std::vector<double> ScriptedScorer::score_segments(const Frame&, const std::vector<int>& segment_ids,
                                                   const TaskQuery&) {
  return replay("select_segment", segment_ids);
}

std::vector<double> ScriptedScorer::score_candidates(const Frame&, const std::vector<CandidateOption>& options,
                                                     const TaskQuery&) {
  std::vector<int> ids;
  for (const auto& o : options) ids.push_back(o.marker);
  return replay("score_candidates", ids);
}

namespace {

void check_length(const std::vector<double>& scores, std::size_t n) {
  if (scores.size() != n) {
    throw Error(ErrorCode::LengthMismatch,
                "scorer returned " + std::to_string(scores.size()) + " scores for " + std::to_string(n) + " options");
  }
}

}  // namespace

TargetSceneChoice identify_target_scene(const std::vector<Frame>& frames, const TaskQuery& query, Scorer& scorer) {
  if (frames.empty()) throw Error(ErrorCode::ObjectNotFound, "no frames to choose from");
  auto scores = scorer.score_images(frames, query);
  check_length(scores, frames.size());
  if (abstains(scores)) throw Error(ErrorCode::ObjectNotFound, "'" + query.label + "' is not visible in any frame");
  TargetSceneChoice out;
  out.decision = make_decision(std::move(scores));
  out.position = static_cast<std::size_t>(out.decision.chosen);
  const Frame& f = frames[out.position];
  out.frame_index = f.index;
  out.goal = f.camera_position().head<2>();
  return out;
}

LocatedObject locate_object_in_frame(const Frame& frame, const TaskQuery& query, Scorer& scorer) {
  std::vector<int> ids = frame.segment_ids();
  ids.erase(std::remove(ids.begin(), ids.end(), kFloorId), ids.end());
  if (ids.empty()) throw Error(ErrorCode::SegmentNotFound, "frame has no object segments");
  auto scores = scorer.score_segments(frame, ids, query);
  check_length(scores, ids.size());
  if (abstains(scores)) throw Error(ErrorCode::SegmentNotFound, "no segment matches '" + query.label + "'");
  LocatedObject out;
  out.decision = make_decision(std::move(scores));
  out.segment_id = ids[static_cast<std::size_t>(out.decision.chosen)];
  PointCloud all = frame_to_cloud(frame, out.segment_id);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all.labels[i] == PointLabel::Object) out.points.push_back(all.points[i], PointLabel::Object);
  }
  return out;
}

std::size_t MarkerOverlay::visible_count() const {
  return static_cast<std::size_t>(std::count_if(markers.begin(), markers.end(), [](const Marker& m) { return m.visible; }));
}

MarkerOverlay project_markers(const Frame& frame, const CandidateSet& candidates, const SceneSpec& scene) {
  MarkerOverlay out;
  out.frame_index = frame.index;
  const Vec3 eye = frame.camera_position();
  for (const auto& c : candidates.circles) {
    Marker m;
    m.marker = c.marker;
    const Vec3 ground(c.center.x(), c.center.y(), 0.0);
    if (const auto px = frame.project(ground)) {
      m.pixel = *px;
      const bool in_bounds = px->x() >= 0.0 && px->y() >= 0.0 && px->x() < frame.width && px->y() < frame.height;
      m.visible = in_bounds && !segment_occluded(scene, eye, ground);
    }
    out.markers.push_back(m);
  }
  return out;
}

CandidateDecision score_candidates(const Frame& frame, const MarkerOverlay& overlay, const CandidateSet& candidates,
                                   const TaskQuery& query, Scorer& scorer) {
  std::vector<CandidateOption> options;
  for (const auto& m : overlay.markers) {
    if (!m.visible) continue;
    const auto* c = candidates.find(m.marker);
    if (!c) throw Error(ErrorCode::Precondition, "overlay marker " + std::to_string(m.marker) + " is not a candidate");
    options.push_back({m.marker, c->center, m.pixel});
  }
  if (options.empty()) throw Error(ErrorCode::NoVisibleCandidates, "no candidate marker is visible");
  auto scores = scorer.score_candidates(frame, options, query);
  check_length(scores, options.size());
  CandidateDecision out;
  for (const auto& o : options) out.markers.push_back(o.marker);
  out.decision = make_decision(std::move(scores));
  out.marker = out.markers[static_cast<std::size_t>(out.decision.chosen)];
  return out;
}

RgbImage annotate_frame(const Frame& frame, const MarkerOverlay& overlay) {
  RgbImage img = frame.seg_color_image();
  for (const auto& m : overlay.markers) {
    if (!m.visible) continue;
    const int x = static_cast<int>(std::lround(m.pixel.x()));
    const int y = static_cast<int>(std::lround(m.pixel.y()));
    draw_ring(img, m.pixel.x(), m.pixel.y(), 4.0, {255, 0, 0});
    stamp_number(img, x + 5, y - 5, m.marker, {255, 0, 0}, 1);
  }
  return img;
}

}  // namespace navgaze
