#include "navgaze/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "navgaze/errors.hpp"
#include "navgaze/kernels.hpp"

namespace navgaze {

namespace {

constexpr double kRayEps = 1e-9;

// World -> primitive-local rotation about z.
inline Vec2 to_local(const Vec2& v, double yaw_deg) {
  const double c = std::cos(deg2rad(yaw_deg));
  const double s = std::sin(deg2rad(yaw_deg));
  return {c * v.x() + s * v.y(), -s * v.x() + c * v.y()};
}

inline Vec2 to_world(const Vec2& v, double yaw_deg) {
  const double c = std::cos(deg2rad(yaw_deg));
  const double s = std::sin(deg2rad(yaw_deg));
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

}  // namespace

double Primitive::signed_footprint_distance(const Vec2& p) const {
  if (shape == ShapeKind::Cylinder) return (p - center2d()).norm() - radius();
  const Vec2 local = to_local(p - center2d(), yaw_deg);
  const Vec2 q = local.cwiseAbs() - half().head<2>();
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(std::max(q.x(), q.y()), 0.0);
  return outside + inside;
}

Vec2 Primitive::closest_boundary_point(const Vec2& p) const {
  const Vec2 c = center2d();
  if (shape == ShapeKind::Cylinder) {
    const Vec2 rel = p - c;
    const double n = rel.norm();
    return n < 1e-12 ? Vec2(c + Vec2(radius(), 0.0)) : Vec2(c + rel * (radius() / n));
  }
  const Vec2 h = half().head<2>();
  Vec2 local = to_local(p - c, yaw_deg);
  const bool inside = std::abs(local.x()) <= h.x() && std::abs(local.y()) <= h.y();
  if (!inside) {
    local = local.cwiseMax(-h).cwiseMin(h);
  } else {
    const double gx = h.x() - std::abs(local.x());
    const double gy = h.y() - std::abs(local.y());
    if (gx <= gy) local.x() = std::copysign(h.x(), local.x());
    else local.y() = std::copysign(h.y(), local.y());
  }
  return c + to_world(local, yaw_deg);
}

double Primitive::boundary_along(const Vec2& dir) const {
  if (shape == ShapeKind::Cylinder) return radius();
  const Vec2 d = to_local(dir.normalized(), yaw_deg);
  const Vec2 h = half().head<2>();
  double t = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    if (std::abs(d[i]) > 1e-12) t = std::min(t, h[i] / std::abs(d[i]));
  }
  return t;
}

bool Primitive::footprint_overlaps(const Vec2& lo, const Vec2& hi) const {
  constexpr double kTouch = 1e-9;
  if (shape == ShapeKind::Cylinder) {
    const Vec2 c = center2d();
    const Vec2 closest = c.cwiseMax(lo).cwiseMin(hi);
    return (closest - c).norm() < radius() - kTouch;
  }
  const Vec2 sq_c = (lo + hi) * 0.5;
  const Vec2 sq_h = (hi - lo) * 0.5;
  const Vec2 h = half().head<2>();
  const double c = std::cos(deg2rad(yaw_deg));
  const double s = std::sin(deg2rad(yaw_deg));
  const Vec2 u(c, s);
  const Vec2 v(-s, c);
  const Vec2 delta = center2d() - sq_c;
  for (const Vec2& axis : {Vec2(1.0, 0.0), Vec2(0.0, 1.0), u, v}) {
    const double dist = std::abs(delta.dot(axis));
    const double r_sq = sq_h.x() * std::abs(axis.x()) + sq_h.y() * std::abs(axis.y());
    const double r_box = h.x() * std::abs(u.dot(axis)) + h.y() * std::abs(v.dot(axis));
    if (dist >= r_sq + r_box - kTouch) return false;
  }
  return true;
}

std::optional<double> Primitive::intersect(const Vec3& o, const Vec3& d) const {
  const double z_lo = center.z() - size.z() * 0.5;
  const double z_hi = center.z() + size.z() * 0.5;
  if (shape == ShapeKind::Cylinder) {
    const double r = radius();
    const double ox = o.x() - center.x();
    const double oy = o.y() - center.y();
    double best = std::numeric_limits<double>::infinity();
    const double a = d.x() * d.x() + d.y() * d.y();
    if (a > 1e-18) {
      const double b = 2.0 * (ox * d.x() + oy * d.y());
      const double c = ox * ox + oy * oy - r * r;
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double t = (-b - std::sqrt(disc)) / (2.0 * a);
        const double z = o.z() + t * d.z();
        if (t > kRayEps && z >= z_lo && z <= z_hi) best = t;
      }
    }
    if (std::abs(d.z()) > 1e-18) {
      for (const double zc : {z_lo, z_hi}) {
        const double t = (zc - o.z()) / d.z();
        if (t <= kRayEps || t >= best) continue;
        const double px = ox + t * d.x();
        const double py = oy + t * d.y();
        if (px * px + py * py <= r * r) best = t;
      }
    }
    if (std::isinf(best)) return std::nullopt;
    return best;
  }

  const Vec2 lo2 = to_local(o.head<2>() - center2d(), yaw_deg);
  const Vec2 ld2 = to_local(d.head<2>(), yaw_deg);
  const Vec3 lo(lo2.x(), lo2.y(), o.z() - center.z());
  const Vec3 ld(ld2.x(), ld2.y(), d.z());
  const Vec3 h = half();
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(ld[i]) < 1e-18) {
      if (std::abs(lo[i]) > h[i]) return std::nullopt;
      continue;
    }
    double t1 = (-h[i] - lo[i]) / ld[i];
    double t2 = (h[i] - lo[i]) / ld[i];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
  }
  if (tmax < tmin || tmin <= kRayEps) return std::nullopt;
  return tmin;
}

bool Primitive::on_surface(const Vec3& p, double tol) const {
  const double z_lo = center.z() - size.z() * 0.5;
  const double z_hi = center.z() + size.z() * 0.5;
  if (p.z() < z_lo - tol || p.z() > z_hi + tol) return false;
  if (shape == ShapeKind::Cylinder) {
    const double rad = (p.head<2>() - center2d()).norm();
    if (std::abs(rad - radius()) <= tol) return true;
    return rad <= radius() + tol && (std::abs(p.z() - z_lo) <= tol || std::abs(p.z() - z_hi) <= tol);
  }
  const Vec2 l2 = to_local(p.head<2>() - center2d(), yaw_deg);
  const Vec3 local(l2.x(), l2.y(), p.z() - center.z());
  const Vec3 h = half();
  bool on_face = false;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(local[i]) > h[i] + tol) return false;
    if (std::abs(h[i] - std::abs(local[i])) <= tol) on_face = true;
  }
  return on_face;
}

const Primitive* SceneSpec::find(int object_id) const {
  for (const auto& p : primitives) {
    if (p.object_id == object_id) return &p;
  }
  return nullptr;
}

const Primitive* SceneSpec::find_label(const std::string& label) const {
  const Primitive* best = nullptr;
  for (const auto& p : primitives) {
    if (p.label == label && (!best || p.object_id < best->object_id)) best = &p;
  }
  return best;
}

std::string SceneSpec::label_of(int object_id) const {
  if (object_id == kFloorId) return "floor";
  const auto* p = find(object_id);
  return p ? p->label : std::string();
}

void SceneSpec::validate(double robot_radius) const {
  std::set<int> ids;
  for (const auto& p : primitives) {
    if (p.object_id <= kFloorId) {
      throw Error(ErrorCode::InvalidScene, "object ids must be >= 2 (got " + std::to_string(p.object_id) + ")");
    }
    if (!ids.insert(p.object_id).second) {
      throw Error(ErrorCode::InvalidScene, "duplicate object id " + std::to_string(p.object_id));
    }
    if ((p.size.array() <= 0.0).any() || !p.center.allFinite()) {
      throw Error(ErrorCode::InvalidScene, "primitive " + std::to_string(p.object_id) + " has bad geometry");
    }
    if (p.operation_direction && std::abs(p.operation_direction->norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::InvalidScene,
                  "operation_direction of object " + std::to_string(p.object_id) + " is not unit length");
    }
  }
  if (floor.isEmpty()) throw Error(ErrorCode::InvalidScene, "empty floor extent");
  if (collides(*this, start.position, robot_radius)) {
    throw Error(ErrorCode::InvalidScene, "start pose is in collision");
  }
}

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_deg) {
  CameraIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = (width * 0.5) / std::tan(deg2rad(hfov_deg) * 0.5);
  k.fy = k.fx;
  k.cx = width * 0.5;
  k.cy = height * 0.5;
  return k;
}

Pose3 camera_pose(const Vec2& position, double heading_deg, double pitch_deg, double height) {
  const double th = deg2rad(heading_deg);
  const double ph = deg2rad(pitch_deg);
  const Vec3 forward(std::cos(th) * std::cos(ph), std::sin(th) * std::cos(ph), std::sin(ph));
  const Vec3 right(std::sin(th), -std::cos(th), 0.0);
  const Vec3 down = forward.cross(right);
  Pose3 pose = Pose3::Identity();
  pose.linear().col(0) = right;
  pose.linear().col(1) = down;
  pose.linear().col(2) = forward;
  pose.translation() = Vec3(position.x(), position.y(), height);
  return pose;
}

Vec3 Frame::back_project(double u, double v, double z) const {
  const Vec3 pc((u - intrinsics.cx) / intrinsics.fx * z, (v - intrinsics.cy) / intrinsics.fy * z, z);
  return pose * pc;
}

std::optional<Vec2> Frame::project(const Vec3& world) const {
  const Vec3 pc = pose.inverse() * world;
  if (pc.z() <= 1e-9) return std::nullopt;
  return Vec2(intrinsics.fx * pc.x() / pc.z() + intrinsics.cx, intrinsics.fy * pc.y() / pc.z() + intrinsics.cy);
}

std::vector<int> Frame::segment_ids() const {
  std::set<int> ids(seg.begin(), seg.end());
  ids.erase(0);
  return {ids.begin(), ids.end()};
}

std::size_t Frame::pixel_count(int segment) const {
  return static_cast<std::size_t>(std::count(seg.begin(), seg.end(), segment));
}

GrayImage Frame::depth_image(double max_depth) const {
  GrayImage img(width, height);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double s = std::clamp(depth[i] / max_depth, 0.0, 1.0);
    img.data[i] = static_cast<std::uint8_t>(std::lround(s * 255.0));
  }
  return img;
}

GrayImage Frame::seg_image() const {
  GrayImage img(width, height);
  for (std::size_t i = 0; i < seg.size(); ++i) img.data[i] = static_cast<std::uint8_t>(seg[i] & 0xff);
  return img;
}

RgbImage Frame::seg_color_image() const {
  RgbImage img(width, height);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) img.set(u, v, segment_color(seg_at(u, v)));
  }
  return img;
}

Frame capture_frame(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& intrinsics,
                    int index, Exec exec) {
  Frame f;
  f.width = intrinsics.width;
  f.height = intrinsics.height;
  f.pose = camera;
  f.intrinsics = intrinsics;
  f.index = index;
  const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
  f.depth.assign(n, 0.0f);
  f.seg.assign(n, 0);
  if (exec == Exec::Parallel) kernels::raycast_omp(scene, camera, intrinsics, f.depth, f.seg);
  else kernels::raycast_serial(scene, camera, intrinsics, f.depth, f.seg);
  return f;
}

PointCloud frame_to_cloud(const Frame& frame, std::optional<int> object_segment) {
  PointCloud cloud;
  for (int v = 0; v < frame.height; ++v) {
    for (int u = 0; u < frame.width; ++u) {
      const float z = frame.depth_at(u, v);
      if (z <= 0.0f) continue;
      const bool is_object = object_segment && frame.seg_at(u, v) == *object_segment;
      cloud.push_back(frame.back_project(u, v, z), is_object ? PointLabel::Object : PointLabel::Other);
    }
  }
  return cloud;
}

bool segment_occluded(const SceneSpec& scene, const Vec3& from, const Vec3& to, int ignore_id) {
  const Vec3 d = to - from;
  for (const auto& prim : scene.primitives) {
    if (prim.object_id == ignore_id) continue;
    if (auto t = prim.intersect(from, d); t && *t < 1.0 - 1e-9) return true;
  }
  return false;
}

Vec2 RobotState::forward() const {
  const double th = deg2rad(heading_deg);
  return {std::cos(th), std::sin(th)};
}

RobotState robot_state_from(const Pose2& pose) {
  RobotState s;
  s.position = pose.position;
  s.heading_deg = static_cast<int>(std::lround(wrap_degrees(pose.heading_deg))) % 360;
  return s;
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Stop: return "stop";
    case Action::MoveForward: return "move_forward";
    case Action::TurnLeft: return "turn_left";
    case Action::TurnRight: return "turn_right";
    case Action::LookUp: return "look_up";
    case Action::LookDown: return "look_down";
  }
  return "?";
}

bool collides(const SceneSpec& scene, const Vec2& p, double radius) {
  const auto& f = scene.floor;
  if (p.x() - radius < f.min().x() || p.y() - radius < f.min().y() || p.x() + radius > f.max().x() ||
      p.y() + radius > f.max().y()) {
    return true;
  }
  for (const auto& prim : scene.primitives) {
    if (prim.signed_footprint_distance(p) < radius) return true;
  }
  return false;
}

StepResult apply_action(const SceneSpec& scene, const RobotState& state, Action action,
                        const ActionConfig& cfg) {
  StepResult out{state, false};
  switch (action) {
    case Action::Stop: break;
    case Action::MoveForward: {
      const Vec2 next = state.position + cfg.forward_step * state.forward();
      if (collides(scene, next, cfg.robot_radius)) out.collided = true;
      else out.state.position = next;
      break;
    }
    case Action::TurnLeft: out.state.heading_deg = (state.heading_deg + cfg.turn_deg) % 360; break;
    case Action::TurnRight: out.state.heading_deg = ((state.heading_deg - cfg.turn_deg) % 360 + 360) % 360; break;
    case Action::LookUp: out.state.pitch_deg = std::min(state.pitch_deg + cfg.look_deg, cfg.pitch_limit_deg); break;
    case Action::LookDown: out.state.pitch_deg = std::max(state.pitch_deg - cfg.look_deg, -cfg.pitch_limit_deg); break;
  }
  return out;
}

std::vector<Frame> sweep_capture(const SceneSpec& scene, const RobotState& state, const Vec2& target,
                                 const SweepConfig& sweep, const CameraConfig& camera, Exec exec) {
  const Vec2 rel = target - state.position;
  const double bearing = rad2deg(std::atan2(rel.y(), rel.x()));
  if (std::abs(signed_angle_deg(state.heading_deg, bearing)) > 1.0 + 1e-9) {
    throw Error(ErrorCode::Precondition, "sweep requires the robot to face the target within 1 degree");
  }
  const auto k = camera.intrinsics();
  std::vector<Frame> frames;
  int index = 1;
  for (const double pitch : {0.0, -sweep.pitch_deg}) {
    for (const double yaw : {-sweep.yaw_deg, 0.0, sweep.yaw_deg}) {
      const double p = std::clamp(state.pitch_deg + pitch, -90.0, 90.0);
      const Pose3 pose = camera_pose(state.position, state.heading_deg + yaw, p, camera.height_m);
      frames.push_back(capture_frame(scene, pose, k, index++, exec));
    }
  }
  return frames;
}

namespace {

const Primitive& require_object(const SceneSpec& scene, int object_id) {
  const auto* prim = scene.find(object_id);
  if (!prim) throw Error(ErrorCode::InvalidScene, "no object with id " + std::to_string(object_id));
  return *prim;
}

Pose2 facing(const Vec2& position, const Vec2& target) {
  const Vec2 rel = target - position;
  return {position, wrap_degrees(rad2deg(std::atan2(rel.y(), rel.x())))};
}

}  // namespace

Pose2 optimal_operation_pose(const SceneSpec& scene, int object_id, double robot_radius, double clearance) {
  const auto& prim = require_object(scene, object_id);
  if (!prim.operation_direction) {
    throw Error(ErrorCode::NoOperationDirection, "object " + std::to_string(object_id) + " has no operation direction");
  }
  const Vec2 dir = prim.operation_direction->normalized();
  const Vec2 pos = prim.center2d() + dir * (prim.boundary_along(dir) + robot_radius + clearance);
  return facing(pos, prim.center2d());
}

Pose2 nearest_operation_pose(const SceneSpec& scene, int object_id, const Vec2& from, double robot_radius,
                             double clearance) {
  const auto& prim = require_object(scene, object_id);
  const Vec2 q = prim.closest_boundary_point(from);
  Vec2 outward = from - q;
  if (prim.signed_footprint_distance(from) <= 1e-9 || outward.norm() < 1e-12) outward = q - prim.center2d();
  if (outward.norm() < 1e-12) outward = Vec2::UnitX();
  const Vec2 pos = q + outward.normalized() * (robot_radius + clearance);
  return facing(pos, prim.center2d());
}

OccupancyMap::OccupancyMap(const Vec2& origin, int width, int height, double resolution)
    : origin_(origin), width_(width), height_(height), resolution_(resolution),
      cells_(static_cast<std::size_t>(width) * height, 0) {}

std::optional<std::pair<int, int>> OccupancyMap::cell_of(const Vec2& p) const {
  const Vec2 rel = (p - origin_) / resolution_;
  const double fx = std::floor(rel.x());
  const double fy = std::floor(rel.y());
  if (!(fx >= 0.0 && fy >= 0.0 && fx < width_ && fy < height_)) return std::nullopt;
  return std::pair<int, int>{static_cast<int>(fx), static_cast<int>(fy)};
}

std::size_t OccupancyMap::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

GrayImage OccupancyMap::to_gray() const {
  GrayImage img(width_, height_);
  for (int row = 0; row < height_; ++row) {
    for (int col = 0; col < width_; ++col) img.at(col, height_ - 1 - row) = occupied(col, row) ? 0 : 255;
  }
  return img;
}

OccupancyMap build_occupancy_map(const SceneSpec& scene, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidConfig, "occupancy resolution must be positive");
  const Vec2 extent = scene.floor.sizes();
  const int w = static_cast<int>(std::ceil(extent.x() / resolution - 1e-9));
  const int h = static_cast<int>(std::ceil(extent.y() / resolution - 1e-9));
  OccupancyMap map(scene.floor.min(), w, h, resolution);
  for (const auto& prim : scene.primitives) {
    const double reach = prim.shape == ShapeKind::Cylinder ? prim.radius() : prim.half().head<2>().norm();
    const Vec2 lo = prim.center2d() - Vec2::Constant(reach);
    const Vec2 hi = prim.center2d() + Vec2::Constant(reach);
    const int c0 = std::max(0, static_cast<int>(std::floor((lo.x() - map.origin().x()) / resolution)));
    const int r0 = std::max(0, static_cast<int>(std::floor((lo.y() - map.origin().y()) / resolution)));
    const int c1 = std::min(w - 1, static_cast<int>(std::floor((hi.x() - map.origin().x()) / resolution)));
    const int r1 = std::min(h - 1, static_cast<int>(std::floor((hi.y() - map.origin().y()) / resolution)));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        const Vec2 cell_lo = map.origin() + Vec2(col * resolution, row * resolution);
        if (prim.footprint_overlaps(cell_lo, cell_lo + Vec2::Constant(resolution))) map.set_occupied(col, row, true);
      }
    }
  }
  return map;
}

std::vector<Frame> scene_image_set(const SceneSpec& scene, const std::vector<Pose2>& poses,
                                   const CameraConfig& camera, Exec exec) {
  std::vector<Frame> frames;
  frames.reserve(poses.size());
  const auto k = camera.intrinsics();
  int index = 1;
  for (const auto& pose : poses) {
    frames.push_back(capture_frame(scene, camera_pose(pose.position, pose.heading_deg, 0.0, camera.height_m), k,
                                   index++, exec));
  }
  return frames;
}

}  // namespace navgaze
