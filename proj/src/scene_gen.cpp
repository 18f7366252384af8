#include "navgaze/scene_gen.hpp"

#include <array>
#include <cmath>
#include <random>

#include "navgaze/errors.hpp"

namespace navgaze {

namespace {

struct TargetKind {
  const char* label;
  const char* text;
  double width;   // across the front
  double depth;   // along the operation direction
  double height;
};

constexpr std::array<TargetKind, 6> kTargets{{
    {"refrigerator", "open the refrigerator", 0.70, 0.75, 1.80},
    {"washing machine", "open the washing machine", 0.60, 0.65, 0.85},
    {"oven", "open the oven", 0.60, 0.70, 0.90},
    {"armchair", "sit on the armchair", 0.75, 0.85, 0.90},
    {"cabinet", "open the cabinet", 0.55, 0.70, 1.10},
    {"dishwasher", "load the dishwasher", 0.60, 0.65, 0.85},
}};

constexpr int kFirstWallId = 2;
constexpr int kTargetId = 10;
constexpr int kFirstClutterId = 20;

class Builder {
 public:
  Builder(std::uint64_t seed, const SceneGenParams& p) : rng_(seed), p_(p) {
    const double h = p.room_size * 0.5;
    scene_.floor = Eigen::AlignedBox2d(Vec2(-h, -h), Vec2(h, h));
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

  /// Inner face of each wall sits at ±inner().
  [[nodiscard]] double inner() const { return p_.room_size * 0.5 - kWall; }

  void walls() {
    const double h = p_.room_size * 0.5;
    const double zc = p_.wall_height * 0.5;
    const std::array<std::pair<Vec2, Vec2>, 4> spec{{
        {Vec2(0.0, h - kWall * 0.5), Vec2(p_.room_size, kWall)},
        {Vec2(0.0, -h + kWall * 0.5), Vec2(p_.room_size, kWall)},
        {Vec2(h - kWall * 0.5, 0.0), Vec2(kWall, p_.room_size)},
        {Vec2(-h + kWall * 0.5, 0.0), Vec2(kWall, p_.room_size)},
    }};
    int id = kFirstWallId;
    for (const auto& [c, s] : spec) {
      Primitive w;
      w.object_id = id++;
      w.label = "wall";
      w.center = Vec3(c.x(), c.y(), zc);
      w.size = Vec3(s.x(), s.y(), p_.wall_height);
      scene_.primitives.push_back(w);
    }
  }

  const TargetKind& target_kind() { return kTargets[static_cast<std::size_t>(pick(kTargets.size()))]; }

  /// Box whose local +x is the operation direction.
  Primitive& target(const TargetKind& k, const Vec2& center, double op_deg) {
    Primitive t;
    t.object_id = kTargetId;
    t.label = k.label;
    t.center = Vec3(center.x(), center.y(), k.height * 0.5);
    t.size = Vec3(k.depth, k.width, k.height);
    t.yaw_deg = op_deg;
    t.operation_direction = Vec2(std::cos(deg2rad(op_deg)), std::sin(deg2rad(op_deg)));
    scene_.tasks.push_back({k.text, k.label});
    scene_.primitives.push_back(t);
    return scene_.primitives.back();
  }

  void add(Primitive p) { scene_.primitives.push_back(std::move(p)); }

  void capture_ring(const Vec2& center, double radius, double first_deg, double span_deg, int count) {
    for (int i = 0; i < count; ++i) {
      const double a = first_deg + span_deg * i / count;
      const Vec2 pos = center + radius * Vec2(std::cos(deg2rad(a)), std::sin(deg2rad(a)));
      scene_.capture_poses.push_back({pos, wrap_degrees(a)});
    }
  }

  /// Random collision-free start within `radius` of `center`.
  void start(const Vec2& center, double radius, double margin = 0.35) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const Vec2 pos = center + Vec2(uniform(-radius, radius), uniform(-radius, radius));
      if ((pos - center).norm() > radius) continue;
      if (collides(scene_, pos, margin)) continue;
      scene_.start = {pos, static_cast<double>(pick(360))};
      return;
    }
    scene_.start = {center, 0.0};
  }

  SceneSpec finish(const std::string& name) {
    scene_.name = name;
    scene_.validate(0.2);
    return std::move(scene_);
  }

  SceneSpec& scene() { return scene_; }

  static constexpr double kWall = 0.1;

 private:
  std::mt19937_64 rng_;
  SceneGenParams p_;
  SceneSpec scene_;
};

Primitive box(int id, const std::string& label, const Vec2& c, const Vec3& size, double yaw) {
  Primitive p;
  p.object_id = id;
  p.label = label;
  p.center = Vec3(c.x(), c.y(), size.z() * 0.5);
  p.size = size;
  p.yaw_deg = yaw;
  return p;
}

Primitive cylinder(int id, const std::string& label, const Vec2& c, double diameter, double height) {
  Primitive p;
  p.object_id = id;
  p.label = label;
  p.shape = ShapeKind::Cylinder;
  p.center = Vec3(c.x(), c.y(), height * 0.5);
  p.size = Vec3(diameter, diameter, height);
  return p;
}

/// A wall-aligned heading pointing into the room from wall `side` (0:+y, 1:-y, 2:+x, 3:-x).
double away_from_wall(int side) {
  static constexpr std::array<double, 4> kDeg{-90.0, 90.0, 180.0, 0.0};
  return kDeg[static_cast<std::size_t>(side)];
}

Vec2 wall_normal(int side) {
  const double a = deg2rad(away_from_wall(side));
  return {std::round(std::cos(a)), std::round(std::sin(a))};
}

/// Flush against wall `side` at offset `along` parallel to it.
Vec2 flush_position(const Builder& b, int side, const TargetKind& k, double along) {
  const Vec2 n = wall_normal(side);
  const Vec2 t(-n.y(), n.x());
  return -n * (b.inner() - k.depth * 0.5) + t * along;
}

void standard_layout(Builder& b, const SceneGenParams& p) {
  b.walls();
  b.capture_ring(Vec2::Zero(), p.capture_ring, b.uniform(0.0, 45.0), 360.0, p.capture_count);
}

SceneSpec open_room(std::uint64_t seed, const SceneGenParams& p) {
  Builder b(seed, p);
  standard_layout(b, p);
  const auto& k = b.target_kind();
  const double a = b.uniform(0.0, 360.0);
  const double r = b.uniform(1.9, 2.2);
  const Vec2 c = r * Vec2(std::cos(deg2rad(a)), std::sin(deg2rad(a)));
  b.target(k, c, wrap_degrees(a + 180.0));
  b.start(Vec2::Zero(), 0.8);
  return b.finish("open-room-" + std::to_string(seed));
}

SceneSpec wall_backed(std::uint64_t seed, const SceneGenParams& p) {
  Builder b(seed, p);
  standard_layout(b, p);
  const auto& k = b.target_kind();
  const int side = b.pick(4);
  b.target(k, flush_position(b, side, k, b.uniform(-1.6, 1.6)), away_from_wall(side));
  b.start(Vec2::Zero(), 0.8);
  return b.finish("wall-backed-object-" + std::to_string(seed));
}

SceneSpec corner(std::uint64_t seed, const SceneGenParams& p) {
  Builder b(seed, p);
  standard_layout(b, p);
  const auto& k = b.target_kind();
  const int side = b.pick(4);
  const double sign = b.pick(2) == 0 ? -1.0 : 1.0;
  const double along = sign * (b.inner() - k.width * 0.5);
  b.target(k, flush_position(b, side, k, along), away_from_wall(side));
  b.start(Vec2::Zero(), 0.8);
  return b.finish("corner-object-" + std::to_string(seed));
}

SceneSpec enclosed(std::uint64_t seed, const SceneGenParams& p) {
  Builder b(seed, p);
  standard_layout(b, p);
  const auto& k = b.target_kind();
  const double a = b.uniform(0.0, 360.0);
  const Vec2 c = 2.0 * Vec2(std::cos(deg2rad(a)), std::sin(deg2rad(a)));
  const double op = wrap_degrees(a + 180.0);
  const Primitive& t = b.target(k, c, op);
  const double yaw = t.yaw_deg;
  // A low fence hugging the footprint on all four sides.
  const double gap = 0.1;
  const double th = 0.1;
  const double hx = k.depth * 0.5 + gap + th * 0.5;
  const double hy = k.width * 0.5 + gap + th * 0.5;
  const double fence_h = 0.6;
  const Eigen::Rotation2Dd rot(deg2rad(yaw));
  int id = kFirstClutterId;
  for (const double s : {-1.0, 1.0}) {
    b.add(box(id++, "fence", c + rot * Vec2(s * hx, 0.0), Vec3(th, 2.0 * hy + th, fence_h), yaw));
    b.add(box(id++, "fence", c + rot * Vec2(0.0, s * hy), Vec3(2.0 * hx + th, th, fence_h), yaw));
  }
  b.start(Vec2::Zero(), 0.8);
  return b.finish("enclosed-object-" + std::to_string(seed));
}

bool clear_of(const SceneSpec& s, const Primitive& cand, double margin) {
  for (const auto& q : s.primitives) {
    // Conservative: bounding-circle separation.
    const double rq = q.label == "wall" ? 0.0 : q.half().head<2>().norm();
    const double rc = cand.half().head<2>().norm();
    if (q.label == "wall") {
      if (q.signed_footprint_distance(cand.center2d()) < rc + margin) return false;
      continue;
    }
    if ((q.center2d() - cand.center2d()).norm() < rq + rc + margin) return false;
  }
  return true;
}

SceneSpec cluttered(std::uint64_t seed, const SceneGenParams& p) {
  Builder b(seed, p);
  standard_layout(b, p);
  const auto& k = b.target_kind();
  const int side = b.pick(4);
  const Primitive t = b.target(k, flush_position(b, side, k, b.uniform(-1.4, 1.4)), away_from_wall(side));
  const Vec2 op = *t.operation_direction;
  const Vec2 front = t.center2d() + op * (k.depth * 0.5 + 0.6);

  static constexpr std::array<const char*, 4> kClutter{"chair", "table", "plant", "box"};
  int id = kFirstClutterId;
  for (int attempt = 0; attempt < 400 && id < kFirstClutterId + p.clutter; ++attempt) {
    const char* label = kClutter[static_cast<std::size_t>(b.pick(kClutter.size()))];
    const Vec2 c(b.uniform(-b.inner() + 0.3, b.inner() - 0.3), b.uniform(-b.inner() + 0.3, b.inner() - 0.3));
    Primitive q = std::string(label) == "plant"
                      ? cylinder(id, label, c, b.uniform(0.3, 0.5), b.uniform(0.5, 1.2))
                      : box(id, label, c, Vec3(b.uniform(0.35, 0.8), b.uniform(0.35, 0.8), b.uniform(0.4, 0.9)),
                            b.uniform(0.0, 90.0));
    // Keep the target front, the capture ring and the centre open.
    if ((c - front).norm() < 1.1) continue;
    if (c.norm() < p.capture_ring + 0.8) continue;
    if (!clear_of(b.scene(), q, 0.6)) continue;
    b.add(q);
    ++id;
  }
  b.start(Vec2::Zero(), 0.8);
  return b.finish("cluttered-" + std::to_string(seed));
}

}  // namespace

const std::vector<std::string>& scene_templates() {
  static const std::vector<std::string> kNames{"open-room", "wall-backed-object", "corner-object", "enclosed-object",
                                               "cluttered"};
  return kNames;
}

SceneSpec generate_scene(const std::string& template_name, std::uint64_t seed, const SceneGenParams& params) {
  if (template_name == "open-room") return open_room(seed, params);
  if (template_name == "wall-backed-object") return wall_backed(seed, params);
  if (template_name == "corner-object") return corner(seed, params);
  if (template_name == "enclosed-object") return enclosed(seed, params);
  if (template_name == "cluttered") return cluttered(seed, params);
  throw Error(ErrorCode::UnknownTemplate, "unknown scene template '" + template_name + "'");
}

SceneSpec generate_back_facing_scene(std::uint64_t seed, const SceneGenParams& params) {
  Builder b(seed, params);
  b.walls();
  const auto& k = b.target_kind();
  const double a = b.uniform(0.0, 360.0);
  const Vec2 dir(std::cos(deg2rad(a)), std::sin(deg2rad(a)));
  // Target front looks toward the nearest wall with about a metre of room.
  const double reach = b.inner() / std::max(std::abs(dir.x()), std::abs(dir.y()));
  const Vec2 c = dir * (reach - 1.05 - k.depth * 0.5);
  b.target(k, c, a);
  // Capture poses sweep the half-circle behind the target, looking at it.
  const Vec2 back = c - dir * (k.depth * 0.5 + 1.3);
  for (int i = 0; i < 5; ++i) {
    const double off = -60.0 + 30.0 * i;
    const Vec2 pos = c + Eigen::Rotation2Dd(deg2rad(off)) * (back - c);
    const Vec2 rel = c - pos;
    b.scene().capture_poses.push_back({pos, wrap_degrees(rad2deg(std::atan2(rel.y(), rel.x())))});
  }
  b.start(c - dir * (k.depth * 0.5 + 2.0), 0.3);
  return b.finish("back-facing-" + std::to_string(seed));
}

std::vector<SceneSpec> reachable_suite(int count, std::uint64_t seed) {
  static constexpr std::array<const char*, 4> kOrder{"open-room", "wall-backed-object", "corner-object", "cluttered"};
  std::vector<SceneSpec> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(generate_scene(kOrder[static_cast<std::size_t>(i) % kOrder.size()], seed + static_cast<std::uint64_t>(i)));
  }
  return out;
}

std::vector<SceneSpec> side_back_suite(int count, std::uint64_t seed) {
  std::vector<SceneSpec> out;
  for (int i = 0; i < count; ++i) out.push_back(generate_back_facing_scene(seed + static_cast<std::uint64_t>(i)));
  return out;
}

std::vector<SceneSpec> ablation_suite(int count, std::uint64_t seed) {
  auto out = reachable_suite(count - count / 2, seed);
  auto back = side_back_suite(count / 2, seed + 1000);
  out.insert(out.end(), back.begin(), back.end());
  return out;
}

}  // namespace navgaze
