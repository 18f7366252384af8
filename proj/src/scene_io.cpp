#include "navgaze/scene_io.hpp"

#include <fstream>
#include <sstream>

#include "navgaze/errors.hpp"

namespace navgaze {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }
ordered_json vec(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidScene, "scene field '" + field + "': " + why);
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) bad(ctx + key, "missing");
  return j.at(key);
}

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != N) bad(field, "expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) bad(field, "non-numeric entry");
    out[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

double read_num(const json& j, const std::string& field) {
  if (!j.is_number()) bad(field, "expected a number");
  return j.get<double>();
}

std::string read_str(const json& j, const std::string& field) {
  if (!j.is_string()) bad(field, "expected a string");
  return j.get<std::string>();
}

}  // namespace

ordered_json to_json(const Pose2& pose) {
  ordered_json j;
  j["position"] = vec(pose.position);
  j["heading_deg"] = pose.heading_deg;
  return j;
}

Pose2 pose2_from_json(const json& j) {
  Pose2 p;
  p.position = read_vec<2>(need(j, "position", ""), "position");
  p.heading_deg = j.contains("heading_deg") ? read_num(j["heading_deg"], "heading_deg") : 0.0;
  return p;
}

ordered_json to_json(const SceneSpec& scene) {
  ordered_json j;
  j["name"] = scene.name;
  j["floor"] = {{"min", vec(Vec2(scene.floor.min()))}, {"max", vec(Vec2(scene.floor.max()))}};
  j["start"] = to_json(scene.start);
  ordered_json caps = ordered_json::array();
  for (const auto& p : scene.capture_poses) caps.push_back(to_json(p));
  j["capture_poses"] = caps;
  ordered_json tasks = ordered_json::array();
  for (const auto& t : scene.tasks) tasks.push_back({{"text", t.text}, {"label", t.label}});
  j["tasks"] = tasks;
  ordered_json prims = ordered_json::array();
  for (const auto& p : scene.primitives) {
    ordered_json o;
    o["id"] = p.object_id;
    o["label"] = p.label;
    o["shape"] = p.shape == ShapeKind::Box ? "box" : "cylinder";
    o["center"] = vec(p.center);
    o["size"] = vec(p.size);
    o["yaw_deg"] = p.yaw_deg;
    if (p.operation_direction) o["operation_direction"] = vec(*p.operation_direction);
    prims.push_back(o);
  }
  j["primitives"] = prims;
  return j;
}

SceneSpec scene_from_json(const json& j) {
  if (!j.is_object()) bad("<root>", "expected an object");
  SceneSpec s;
  s.name = j.contains("name") ? read_str(j["name"], "name") : std::string{};
  const json& floor = need(j, "floor", "");
  s.floor = Eigen::AlignedBox2d(read_vec<2>(need(floor, "min", "floor."), "floor.min"),
                                read_vec<2>(need(floor, "max", "floor."), "floor.max"));
  if (s.floor.isEmpty()) bad("floor", "min must be below max");
  s.start = pose2_from_json(need(j, "start", ""));
  if (j.contains("capture_poses")) {
    for (const auto& p : j["capture_poses"]) s.capture_poses.push_back(pose2_from_json(p));
  }
  if (j.contains("tasks")) {
    std::size_t i = 0;
    for (const auto& t : j["tasks"]) {
      const std::string ctx = "tasks[" + std::to_string(i++) + "].";
      s.tasks.push_back({read_str(need(t, "text", ctx), ctx + "text"), read_str(need(t, "label", ctx), ctx + "label")});
    }
  }
  std::size_t i = 0;
  for (const auto& o : need(j, "primitives", "")) {
    const std::string ctx = "primitives[" + std::to_string(i++) + "].";
    Primitive p;
    const json& id = need(o, "id", ctx);
    if (!id.is_number_integer()) bad(ctx + "id", "expected an integer");
    p.object_id = id.get<int>();
    p.label = read_str(need(o, "label", ctx), ctx + "label");
    const std::string shape = o.contains("shape") ? read_str(o["shape"], ctx + "shape") : "box";
    if (shape == "box") p.shape = ShapeKind::Box;
    else if (shape == "cylinder") p.shape = ShapeKind::Cylinder;
    else bad(ctx + "shape", "unknown shape '" + shape + "'");
    p.center = read_vec<3>(need(o, "center", ctx), ctx + "center");
    p.size = read_vec<3>(need(o, "size", ctx), ctx + "size");
    if ((p.size.array() <= 0.0).any()) bad(ctx + "size", "extents must be positive");
    p.yaw_deg = o.contains("yaw_deg") ? read_num(o["yaw_deg"], ctx + "yaw_deg") : 0.0;
    if (o.contains("operation_direction") && !o["operation_direction"].is_null()) {
      p.operation_direction = read_vec<2>(o["operation_direction"], ctx + "operation_direction");
    }
    s.primitives.push_back(p);
  }
  return s;
}

std::string dump_scene(const SceneSpec& scene) { return to_json(scene).dump(2) + "\n"; }

void save_scene(const std::filesystem::path& path, const SceneSpec& scene) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  out << dump_scene(scene);
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read scene " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidScene, path.string() + ": " + e.what());
  }
  return scene_from_json(j);
}

}  // namespace navgaze
