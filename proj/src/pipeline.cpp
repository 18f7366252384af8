#include "navgaze/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "navgaze/errors.hpp"

namespace navgaze {

using nlohmann::ordered_json;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Full: return "full";
    case Mode::DNT: return "dnt";
    case Mode::OGD: return "ogd";
    case Mode::NoRTS: return "norts";
  }
  return "?";
}

Mode mode_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Mode m : {Mode::Full, Mode::DNT, Mode::OGD, Mode::NoRTS}) {
    if (lower == to_string(m)) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "mode: unknown value '" + std::string(s) + "' (full|dnt|ogd|norts)");
}

void PipelineConfig::validate() const {
  const auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, std::string(field) + ": must be a positive number");
    }
  };
  positive(robot_radius, "robot_radius");
  positive(grid_resolution, "grid_resolution");
  positive(epsilon, "epsilon");
  positive(success_threshold, "success_threshold");
  positive(map_resolution, "map_resolution");
  positive(grid_margin, "grid_margin");
  positive(actions.forward_step, "forward_step");
  for (const auto& [v, field] : {std::pair{alpha0_deg, "alpha0_deg"}, std::pair{alpha1_deg, "alpha1_deg"}}) {
    if (!(v > 0.0 && v < 90.0)) throw Error(ErrorCode::InvalidConfig, std::string(field) + ": must lie in (0, 90)");
  }
  if (ransac.iterations < 1) throw Error(ErrorCode::InvalidConfig, "ransac_iterations: must be >= 1");
  positive(ransac.inlier_tol, "ransac_inlier_tol");
}

ordered_json to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["robot_radius"] = cfg.robot_radius;
  j["grid_resolution"] = cfg.grid_resolution;
  j["alpha0_deg"] = cfg.alpha0_deg;
  j["alpha1_deg"] = cfg.alpha1_deg;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["mode"] = to_string(cfg.mode);
  j["success_threshold"] = cfg.success_threshold;
  j["map_resolution"] = cfg.map_resolution;
  j["grid_margin"] = cfg.grid_margin;
  j["ground_support"] = cfg.ground_support;
  j["forward_step"] = cfg.actions.forward_step;
  j["turn_deg"] = cfg.actions.turn_deg;
  j["camera"] = {{"width", cfg.camera.width},
                 {"height", cfg.camera.height},
                 {"hfov_deg", cfg.camera.hfov_deg},
                 {"height_m", cfg.camera.height_m}};
  j["inflation_margin"] = cfg.planner.inflation_margin;
  j["ransac_iterations"] = cfg.ransac.iterations;
  j["ransac_inlier_tol"] = cfg.ransac.inlier_tol;
  j["ransac_max_tilt_deg"] =
      cfg.ransac.max_tilt_deg ? ordered_json(*cfg.ransac.max_tilt_deg) : ordered_json(nullptr);
  return j;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig base) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config: expected a JSON object");
  const auto num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected a number");
    out = j[key].get<double>();
  };
  const auto integer = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw Error(ErrorCode::InvalidConfig, std::string(key) + ": expected an integer");
    out = j[key].get<std::remove_reference_t<decltype(out)>>();
  };
  num("robot_radius", base.robot_radius);
  num("grid_resolution", base.grid_resolution);
  num("alpha0_deg", base.alpha0_deg);
  num("alpha1_deg", base.alpha1_deg);
  num("epsilon", base.epsilon);
  integer("seed", base.seed);
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw Error(ErrorCode::InvalidConfig, "mode: expected a string");
    base.mode = mode_from_string(j["mode"].get<std::string>());
  }
  num("success_threshold", base.success_threshold);
  num("map_resolution", base.map_resolution);
  num("grid_margin", base.grid_margin);
  num("ground_support", base.ground_support);
  num("forward_step", base.actions.forward_step);
  integer("turn_deg", base.actions.turn_deg);
  num("inflation_margin", base.planner.inflation_margin);
  integer("ransac_iterations", base.ransac.iterations);
  num("ransac_inlier_tol", base.ransac.inlier_tol);
  if (j.contains("ransac_max_tilt_deg")) {
    const auto& t = j["ransac_max_tilt_deg"];
    if (t.is_null()) base.ransac.max_tilt_deg.reset();
    else if (t.is_number()) base.ransac.max_tilt_deg = t.get<double>();
    else throw Error(ErrorCode::InvalidConfig, "ransac_max_tilt_deg: expected a number or null");
  }
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    if (!c.is_object()) throw Error(ErrorCode::InvalidConfig, "camera: expected an object");
    base.camera.width = c.value("width", base.camera.width);
    base.camera.height = c.value("height", base.camera.height);
    base.camera.hfov_deg = c.value("hfov_deg", base.camera.hfov_deg);
    base.camera.height_m = c.value("height_m", base.camera.height_m);
  }
  base.actions.robot_radius = base.robot_radius;
  return base;
}

void EpisodeTrace::add(const std::string& event, ordered_json data) {
  ordered_json e;
  e["event"] = event;
  for (auto& [k, v] : data.items()) e[k] = std::move(v);
  events_.push_back(std::move(e));
}

std::string EpisodeTrace::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) out += e.dump() + "\n";
  return out;
}

EpisodeTrace EpisodeTrace::from_jsonl(const std::string& text) {
  EpisodeTrace t;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto e = ordered_json::parse(line);
      if (!e.is_object() || !e.contains("event") || !e["event"].is_string()) {
        throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": missing 'event'");
      }
      t.events_.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::MalformedTrace, "line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return t;
}

const ordered_json* EpisodeTrace::find(const std::string& event) const {
  for (const auto& e : events_) {
    if (e["event"] == event) return &e;
  }
  return nullptr;
}

std::string encode_actions(const std::vector<Action>& actions) {
  std::string out;
  out.reserve(actions.size());
  for (Action a : actions) {
    switch (a) {
      case Action::Stop: out += 'S'; break;
      case Action::MoveForward: out += 'F'; break;
      case Action::TurnLeft: out += 'L'; break;
      case Action::TurnRight: out += 'R'; break;
      case Action::LookUp: out += 'U'; break;
      case Action::LookDown: out += 'D'; break;
    }
  }
  return out;
}

std::vector<Action> decode_actions(const std::string& code) {
  std::vector<Action> out;
  for (char c : code) {
    switch (c) {
      case 'S': out.push_back(Action::Stop); break;
      case 'F': out.push_back(Action::MoveForward); break;
      case 'L': out.push_back(Action::TurnLeft); break;
      case 'R': out.push_back(Action::TurnRight); break;
      case 'U': out.push_back(Action::LookUp); break;
      case 'D': out.push_back(Action::LookDown); break;
      default: throw Error(ErrorCode::MalformedTrace, std::string("unknown action code '") + c + "'");
    }
  }
  return out;
}

std::string encode_grid(const TaskGrid& grid) {
  std::string out;
  const auto& cells = grid.cells();
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(cell_code(cells[i])) + "x" + std::to_string(j - i);
    i = j;
  }
  return out;
}

TaskGrid decode_grid(const Vec2& center, double half_extent, double resolution, const std::string& code) {
  TaskGrid grid(center, half_extent, resolution);
  const int n = grid.size();
  std::istringstream in(code);
  std::string run;
  std::size_t pos = 0;
  const std::size_t total = grid.cell_count();
  std::array<std::vector<Vec2>, 4> by_state;
  while (std::getline(in, run, ',')) {
    const auto x = run.find('x');
    if (x == std::string::npos) throw Error(ErrorCode::MalformedTrace, "grid run '" + run + "'");
    int c = 0;
    std::size_t count = 0;
    try {
      c = std::stoi(run.substr(0, x));
      count = std::stoul(run.substr(x + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedTrace, "grid run '" + run + "'");
    }
    if (c < -1 || c > 2 || pos + count > total) throw Error(ErrorCode::MalformedTrace, "grid run '" + run + "'");
    // Inverse of cell_code: -1 unseen, 0 obstacle, 1 ground, 2 object.
    static constexpr std::array<CellState, 4> kStates{CellState::Unseen, CellState::Obstacle, CellState::Ground,
                                                      CellState::QueriedObject};
    const CellState st = kStates[static_cast<std::size_t>(c + 1)];
    for (std::size_t k = 0; k < count; ++k, ++pos) {
      if (st == CellState::Unseen) continue;
      const CellIndex ci{static_cast<int>(pos % n), static_cast<int>(pos / n)};
      by_state[static_cast<std::size_t>(st)].push_back(grid.cell_center(ci));
    }
  }
  if (pos != total) throw Error(ErrorCode::MalformedTrace, "grid code covers " + std::to_string(pos) + " of " +
                                                               std::to_string(total) + " cells");
  for (CellState st : {CellState::Ground, CellState::Obstacle, CellState::QueriedObject}) {
    grid.rasterize(by_state[static_cast<std::size_t>(st)], st);
  }
  return grid;
}

namespace {

ordered_json json_vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

ordered_json json_state(const RobotState& s) {
  return {{"position", json_vec(s.position)}, {"heading_deg", s.heading_deg}, {"pitch_deg", s.pitch_deg}};
}

ActionConfig action_config(const PipelineConfig& cfg) {
  ActionConfig a = cfg.actions;
  a.robot_radius = cfg.robot_radius;
  return a;
}

}  // namespace

Agent::Agent(const SceneSpec& scene, const PipelineConfig& cfg, EpisodeTrace& trace)
    : scene_(scene),
      cfg_(cfg),
      trace_(trace),
      nav_(build_occupancy_map(scene, cfg.map_resolution), cfg.robot_radius, cfg.planner),
      state_(robot_state_from(scene.start)) {}

void Agent::act(const std::vector<Action>& actions) {
  const ActionConfig ac = action_config(cfg_);
  for (Action a : actions) {
    const auto r = apply_action(scene_, state_, a, ac);
    if (r.collided) ++collisions_;
    state_ = r.state;
    actions_.push_back(a);
  }
}

void Agent::turn_to(const Vec2& target) { act(rotate_to_face(state_, target, cfg_.actions.turn_deg)); }

void Agent::stop() { act({Action::Stop}); }

Path Agent::go(const Vec2& goal, double fraction, const std::string& purpose) {
  Path path = plan_path(nav_, state_.position, goal);
  const double stop_at = polyline_length(path.waypoints) * fraction;
  ordered_json wp = ordered_json::array();
  for (const auto& w : path.waypoints) wp.push_back(json_vec(w));
  trace_.add("path", {{"purpose", purpose},
                      {"goal", json_vec(goal)},
                      {"length", path.length},
                      {"stop_at", stop_at},
                      {"waypoints", std::move(wp)}});
  FollowResult res;
  try {
    res = follow_path(scene_, state_, path, stop_at, action_config(cfg_));
  } catch (const StuckError& e) {
    res = e.partial();
    state_ = res.state;
    traveled_ += res.traveled;
    collisions_ += res.collisions;
    actions_.insert(actions_.end(), res.actions.begin(), res.actions.end());
    throw;
  }
  state_ = res.state;
  traveled_ += res.traveled;
  collisions_ += res.collisions;
  actions_.insert(actions_.end(), res.actions.begin(), res.actions.end());
  trace_.add("follow", {{"purpose", purpose},
                        {"actions", res.actions.size()},
                        {"traveled", res.traveled},
                        {"collisions", res.collisions},
                        {"state", json_state(state_)}});
  return path;
}

Frame Agent::capture(double pitch_deg, int index) const {
  const Pose3 pose = camera_pose(state_.position, state_.heading_deg, pitch_deg, cfg_.camera.height_m);
  return capture_frame(scene_, pose, cfg_.camera.intrinsics(), index, cfg_.exec);
}

namespace {

const CandidateCircle& nearest_candidate(const CandidateSet& set, const Vec2& p) {
  const CandidateCircle* best = &set.circles.front();
  for (const auto& c : set.circles) {
    if ((c.center - p).norm() < (best->center - p).norm()) best = &c;
  }
  return *best;
}

struct StepChoice {
  Vec2 target;
  int marker;
  bool fallback;
  std::vector<Vec2> object_points;
};

std::vector<Vec2> object_xy(const Frame& frame, const TaskQuery& query, Scorer& scorer) {
  std::vector<Vec2> out;
  try {
    for (const auto& p : locate_object_in_frame(frame, query, scorer).points.points) out.push_back(p.head<2>());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SegmentNotFound) throw;
  }
  return out;
}

StepChoice decide_step(Agent& agent, const CandidateSet& candidates, const TaskQuery& query, Scorer& scorer,
                       const PipelineConfig& cfg, EpisodeTrace& trace, int step) {
  const Frame frame = agent.capture(-cfg.alpha1_deg, 100 + step);
  const MarkerOverlay overlay = project_markers(frame, candidates, agent.scene());
  auto seen = object_xy(frame, query, scorer);
  ordered_json ev{{"step", step}, {"visible", overlay.visible_count()}, {"object_points", seen.size()}};
  try {
    const auto d = score_candidates(frame, overlay, candidates, query, scorer);
    const auto* c = candidates.find(d.marker);
    ev["markers"] = d.markers;
    ev["scores"] = d.decision.scores;
    ev["chosen"] = d.marker;
    ev["fallback"] = false;
    trace.add("decision", std::move(ev));
    return {c->center, d.marker, false, std::move(seen)};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoVisibleCandidates) throw;
    const auto& c = nearest_candidate(candidates, agent.state().position);
    ev["chosen"] = c.marker;
    ev["fallback"] = true;
    trace.add("decision", std::move(ev));
    return {c.center, c.marker, true, std::move(seen)};
  }
}

}  // namespace

SequentialOutcome sequential_decision(Agent& agent, const CandidateSet& candidates, const Vec2& object_center,
                                      const TaskQuery& query, Scorer& scorer, const PipelineConfig& cfg,
                                      EpisodeTrace& trace, bool one_step) {
  if (candidates.empty()) throw Error(ErrorCode::NoFeasibleCandidate, "no candidates to decide between");
  const StepChoice first = decide_step(agent, candidates, query, scorer, cfg, trace, 1);
  if (one_step) {
    agent.go(first.target, 1.0, "decision-1");
    return {first.target, first.marker, first.fallback, first.object_points};
  }
  agent.go(first.target, 0.5, "decision-1-midpoint");
  agent.turn_to(object_center);
  const StepChoice second = decide_step(agent, candidates, query, scorer, cfg, trace, 2);
  agent.go(second.target, 1.0, "decision-2");
  std::vector<Vec2> seen = first.object_points;
  seen.insert(seen.end(), second.object_points.begin(), second.object_points.end());
  return {second.target, second.marker, first.fallback || second.fallback, std::move(seen)};
}

Pose2 ground_truth_goal(const SceneSpec& scene, int object_id, const PipelineConfig& cfg) {
  const Primitive* obj = scene.find(object_id);
  if (obj && obj->operation_direction) return optimal_operation_pose(scene, object_id, cfg.robot_radius, cfg.epsilon);
  return nearest_operation_pose(scene, object_id, scene.start.position, cfg.robot_radius, cfg.epsilon);
}

namespace {

constexpr double kFlatSpread = 0.03;

// Where to look for an object seen from `viewer`. When the visible points form
// a single face (nearly collinear on the ground), their enclosing circle sits
// on that face, so the estimate moves one radius behind it.
Vec2 facing_center(const std::vector<Vec2>& pts, const Vec2& viewer, double min_radius) {
  const ObjectFootprint fp = object_footprint(pts, min_radius);
  if (pts.size() < 3) return fp.center;
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  if (std::sqrt(std::max(eig.eigenvalues()(0), 0.0)) > kFlatSpread) return fp.center;
  Vec2 normal = eig.eigenvectors().col(0);
  if (normal.dot(fp.center - viewer) < 0.0) normal = -normal;
  return fp.center + normal * fp.radius;
}

Vec2 centroid_xy(const PointCloud& cloud) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyObject, "object point cloud is empty");
  Vec2 sum = Vec2::Zero();
  for (const auto& p : cloud.points) sum += p.head<2>();
  return sum / static_cast<double>(cloud.size());
}

struct Reconstruction {
  std::vector<Vec2> object_world;
  TaskGrid grid;
  GroundFrame frame;
  ObjectFootprint footprint;  // ground-frame coordinates
  Vec2 object_center;         // world xy
};

Reconstruction reconstruct(const std::vector<Frame>& frames, const TaskQuery& query, Scorer& scorer,
                           const PipelineConfig& cfg, EpisodeTrace& trace) {
  PointCloud cloud;
  ordered_json per_frame = ordered_json::array();
  for (const auto& f : frames) {
    std::optional<int> seg;
    try {
      seg = locate_object_in_frame(f, query, scorer).segment_id;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SegmentNotFound) throw;
    }
    cloud.append(frame_to_cloud(f, seg));
    per_frame.push_back(seg ? ordered_json(*seg) : ordered_json(nullptr));
  }
  trace.add("fuse", {{"frames", frames.size()}, {"segments", std::move(per_frame)}, {"points", cloud.size()}});

  const PlaneModel plane = fit_ground_plane(cloud, cfg.ransac, cfg.seed, cfg.exec);
  trace.add("ground_plane", {{"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}},
                             {"d", plane.d},
                             {"inliers", plane.inliers.size()}});
  const GroundFrame gf = GroundFrame::from_plane(plane);

  std::vector<Vec2> ground;
  std::vector<Vec2> obstacle;
  std::vector<Vec2> object;
  std::vector<Vec2> object_world;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Vec2 q = gf.project(p);
    if (cloud.labels[i] == PointLabel::Object) {
      object.push_back(q);
      object_world.push_back(p.head<2>());
      continue;
    }
    const double h = plane.signed_distance(p);
    if (std::abs(h) <= cfg.ransac.inlier_tol) ground.push_back(q);
    else if (h > 0.0) obstacle.push_back(q);
  }
  const ObjectFootprint fp = object_footprint(object, cfg.grid_resolution);
  TaskGrid grid = build_task_grid(fp, cfg.grid_resolution, cfg.grid_margin);
  grid.rasterize(ground, CellState::Ground);
  grid.rasterize(obstacle, CellState::Obstacle);
  grid.rasterize(object, CellState::QueriedObject);
  const Vec2 center = gf.lift(fp.center).head<2>();
  trace.add("task_grid", {{"center", json_vec(center)},
                          {"footprint_radius", fp.radius},
                          {"size", grid.size()},
                          {"resolution", grid.resolution()},
                          {"ground", grid.count(CellState::Ground)},
                          {"obstacle", grid.count(CellState::Obstacle)},
                          {"object", grid.count(CellState::QueriedObject)},
                          {"unseen", grid.count(CellState::Unseen)},
                          {"grid_center", json_vec(grid.center())},
                          {"half_extent", grid.half_extent()},
                          {"cells", encode_grid(grid)}});
  return {std::move(object_world), std::move(grid), gf, fp, center};
}

CandidateSet lift_candidates(const CandidateSet& local, const GroundFrame& gf) {
  CandidateSet out = local;
  for (auto& c : out.circles) c.center = gf.lift(c.center).head<2>();
  return out;
}

double heading_error(const RobotState& s, const Vec2& target) {
  const Vec2 rel = target - s.position;
  if (rel.norm() < 1e-12) return 0.0;
  return std::abs(signed_angle_deg(s.heading_deg, rad2deg(std::atan2(rel.y(), rel.x()))));
}

}  // namespace

EpisodeOutput run_episode(const SceneSpec& scene, const TaskQuery& query, Scorer& scorer, const PipelineConfig& cfg_in) {
  PipelineConfig cfg = cfg_in;
  cfg.actions.robot_radius = cfg.robot_radius;
  cfg.validate();

  EpisodeOutput out;
  EpisodeTrace& trace = out.trace;
  EpisodeResult& r = out.result;
  r.scene = scene.name;
  r.query = query.text;
  r.mode = std::string(to_string(cfg.mode));
  r.seed = cfg.seed;

  Agent agent(scene, cfg, trace);
  trace.add("start", {{"scene", scene.name},
                      {"query", query.text},
                      {"label", query.label},
                      {"mode", to_string(cfg.mode)},
                      {"seed", cfg.seed},
                      {"state", json_state(agent.state())}});

  const Primitive* truth = scene.find_label(query.label);
  std::optional<Pose2> optimal;
  if (truth) {
    optimal = ground_truth_goal(scene, truth->object_id, cfg);
    try {
      r.shortest_length = plan_path(agent.nav(), scene.start.position, optimal->position).length;
    } catch (const Error&) {
      r.shortest_length = (optimal->position - scene.start.position).norm();
    }
    r.optimal_pose = *optimal;
  }

  Vec2 face_target = Vec2::Zero();
  bool have_face_target = false;
  try {
    // Stage 1: pick the frame that shows the object, drive to where it was taken.
    const auto frames = scene_image_set(scene, scene.capture_poses, cfg.camera, cfg.exec);
    const auto choice = identify_target_scene(frames, query, scorer);
    const Frame& chosen = frames[choice.position];
    const auto located = locate_object_in_frame(chosen, query, scorer);
    const Vec2 estimate = centroid_xy(located.points);
    face_target = estimate;
    have_face_target = true;
    trace.add("select_image", {{"frame", choice.frame_index},
                               {"scores", choice.decision.scores},
                               {"goal", json_vec(choice.goal)},
                               {"segment", located.segment_id},
                               {"object_points", located.points.size()},
                               {"estimate", json_vec(estimate)}});
    out.artifacts.paths.push_back(agent.go(choice.goal, 1.0, "stage-1"));
    agent.turn_to(estimate);

    if (cfg.mode == Mode::DNT) {
      std::vector<Vec2> xy;
      for (const auto& p : located.points.points) xy.push_back(p.head<2>());
      const ObjectFootprint fp = object_footprint(xy, cfg.grid_resolution);
      face_target = fp.center;
      trace.add("direct", {{"footprint_center", json_vec(fp.center)}, {"footprint_radius", fp.radius}});
      out.artifacts.paths.push_back(agent.go(fp.center, 1.0, "direct"));
    } else {
      // Stage 2: densify around the object.
      std::vector<Frame> views;
      if (cfg.mode == Mode::NoRTS) {
        views.push_back(chosen);
      } else {
        views = sweep_capture(scene, agent.state(), estimate, SweepConfig{cfg.alpha0_deg, cfg.alpha1_deg}, cfg.camera,
                              cfg.exec);
      }
      // Stage 3: task-aware grid and candidate regions.
      Reconstruction rec = reconstruct(views, query, scorer, cfg, trace);
      face_target = rec.object_center;
      CandidateOptions copts;
      copts.robot_radius = cfg.robot_radius;
      copts.epsilon = cfg.epsilon;
      copts.seed = cfg.seed;
      copts.ground_support = cfg.ground_support;
      copts.exec = cfg.exec;
      out.artifacts.grid = rec.grid;
      const CandidateSet local = generate_candidates(rec.grid, copts);
      const CandidateSet world = lift_candidates(local, rec.frame);
      out.artifacts.candidates = world;
      trace.add("candidates", to_json(world));
      // Stage 4: sequential decision.
      agent.turn_to(rec.object_center);
      const auto outcome = sequential_decision(agent, world, rec.object_center, query, scorer, cfg, trace,
                                               cfg.mode == Mode::OGD);
      // Every object pixel seen so far refines where the robot finally looks.
      std::vector<Vec2> all = std::move(rec.object_world);
      all.insert(all.end(), outcome.object_points.begin(), outcome.object_points.end());
      face_target = facing_center(all, agent.state().position, cfg.grid_resolution);
      trace.add("target", {{"marker", outcome.marker},
                           {"center", json_vec(outcome.target)},
                           {"fallback", outcome.fallback},
                           {"face", json_vec(face_target)}});
    }
    agent.turn_to(face_target);
    agent.stop();
  } catch (const Error& e) {
    r.failure = std::string(to_string(e.code()));
    trace.add("error", {{"code", to_string(e.code())}, {"message", e.what()}});
    if (have_face_target) agent.turn_to(face_target);
    agent.stop();
  }

  const RobotState& s = agent.state();
  r.final_pose = {s.position, static_cast<double>(s.heading_deg)};
  r.traveled = agent.traveled();
  r.collisions = agent.collisions();
  if (optimal) {
    r.dtg = compute_dtg(s.position, optimal->position);
    r.heading_error_deg = heading_error(s, truth->center2d());
  } else {
    r.dtg = std::numeric_limits<double>::infinity();
    r.heading_error_deg = 180.0;
    if (!r.failure) r.failure = std::string(to_string(ErrorCode::ObjectNotFound));
  }
  r.success = r.dtg < cfg.success_threshold;
  trace.add("end", {{"state", json_state(s)},
                    {"actions", encode_actions(agent.actions())},
                    {"traveled", r.traveled},
                    {"collisions", r.collisions}});
  trace.add("result", to_json(r));
  return out;
}

EpisodeOutput run_ablation(const SceneSpec& scene, const TaskQuery& query, Scorer& scorer, PipelineConfig cfg,
                           Mode mode) {
  cfg.mode = mode;
  return run_episode(scene, query, scorer, cfg);
}

}  // namespace navgaze
