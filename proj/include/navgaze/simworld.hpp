#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "navgaze/geometry.hpp"
#include "navgaze/image_io.hpp"

namespace navgaze {

/// Segment id reported for floor hits. Scene primitives use ids >= 2.
constexpr int kFloorId = 1;

enum class ShapeKind { Box, Cylinder };

/// A static scene element: a yawed box or an upright cylinder standing on the floor.
/// `size` holds full extents (x, y, z); for a cylinder size.x() is the diameter.
struct Primitive {
  int object_id = 0;
  std::string label;
  ShapeKind shape = ShapeKind::Box;
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  double yaw_deg = 0.0;
  std::optional<Vec2> operation_direction;

  [[nodiscard]] Vec2 center2d() const { return center.head<2>(); }
  [[nodiscard]] Vec3 half() const { return size * 0.5; }
  [[nodiscard]] double radius() const { return size.x() * 0.5; }

  /// Negative inside the footprint, zero on its boundary.
  [[nodiscard]] double signed_footprint_distance(const Vec2& p) const;
  /// Closest footprint boundary point to p.
  [[nodiscard]] Vec2 closest_boundary_point(const Vec2& p) const;
  /// Distance from the footprint centre to its boundary along a unit direction.
  [[nodiscard]] double boundary_along(const Vec2& dir) const;
  /// Whether the footprint overlaps the open axis-aligned square [lo, hi].
  [[nodiscard]] bool footprint_overlaps(const Vec2& lo, const Vec2& hi) const;
  /// Ray o + t·d, t > 0; returns the entering parameter t (in units of |d|).
  [[nodiscard]] std::optional<double> intersect(const Vec3& o, const Vec3& d) const;
  [[nodiscard]] bool on_surface(const Vec3& p, double tol) const;
};

struct Pose2 {
  Vec2 position = Vec2::Zero();
  double heading_deg = 0.0;
};

struct SceneTask {
  std::string text;
  std::string label;
};

/// Ground-truth synthetic world.
struct SceneSpec {
  std::string name;
  Eigen::AlignedBox2d floor{Vec2(-3.0, -3.0), Vec2(3.0, 3.0)};
  std::vector<Primitive> primitives;
  Pose2 start;
  std::vector<Pose2> capture_poses;
  std::vector<SceneTask> tasks;

  [[nodiscard]] const Primitive* find(int object_id) const;
  /// Lowest object id carrying the label, or nullptr.
  [[nodiscard]] const Primitive* find_label(const std::string& label) const;
  [[nodiscard]] std::string label_of(int object_id) const;

  /// Throws Error(InvalidScene) on duplicate ids, reserved ids, non-unit operation
  /// directions, or a start pose in collision for the given robot radius.
  void validate(double robot_radius) const;
};

struct CameraIntrinsics {
  double fx = 80.0;
  double fy = 80.0;
  double cx = 80.0;
  double cy = 60.0;
  int width = 160;
  int height = 120;

  /// Square pixels, principal point at (width/2, height/2).
  static CameraIntrinsics from_hfov(int width, int height, double hfov_deg);
};

struct CameraConfig {
  int width = 160;
  int height = 120;
  double hfov_deg = 90.0;
  double height_m = 1.5;

  [[nodiscard]] CameraIntrinsics intrinsics() const {
    return CameraIntrinsics::from_hfov(width, height, hfov_deg);
  }
};

/// World-from-camera pose in the optical convention (x right, y down, z forward)
/// for a camera at `height` above `position`, yawed by heading and pitched up by pitch.
Pose3 camera_pose(const Vec2& position, double heading_deg, double pitch_deg, double height);

/// One simulated RGB-D capture with oracle segmentation. Depth is z-depth in
/// meters, 0 where the ray hits nothing; seg is the hit object id, 0 for none.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<float> depth;
  std::vector<std::int32_t> seg;
  Pose3 pose = Pose3::Identity();
  CameraIntrinsics intrinsics;
  int index = 0;

  [[nodiscard]] float depth_at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  [[nodiscard]] std::int32_t seg_at(int u, int v) const { return seg[static_cast<std::size_t>(v) * width + u]; }
  [[nodiscard]] Vec3 back_project(double u, double v, double z) const;
  /// Pixel coordinates of a world point, nullopt if it is not in front of the camera.
  [[nodiscard]] std::optional<Vec2> project(const Vec3& world) const;
  [[nodiscard]] Vec3 camera_position() const { return pose.translation(); }
  /// Distinct non-zero segment ids, ascending.
  [[nodiscard]] std::vector<int> segment_ids() const;
  [[nodiscard]] std::size_t pixel_count(int segment) const;
  [[nodiscard]] GrayImage depth_image(double max_depth = 8.0) const;
  [[nodiscard]] GrayImage seg_image() const;
  [[nodiscard]] RgbImage seg_color_image() const;
};

Frame capture_frame(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& intrinsics,
                    int index = 0, Exec exec = Exec::Parallel);

/// Back-projects every hit pixel; pixels of `object_segment` are labelled Object.
PointCloud frame_to_cloud(const Frame& frame, std::optional<int> object_segment);

/// Whether the straight segment from `from` to `to` passes through any primitive
/// (the floor is not an occluder). `ignore_id` skips one primitive.
bool segment_occluded(const SceneSpec& scene, const Vec3& from, const Vec3& to, int ignore_id = -1);

struct RobotState {
  Vec2 position = Vec2::Zero();
  int heading_deg = 0;  // [0, 360)
  int pitch_deg = 0;    // clamped to ±pitch_limit

  [[nodiscard]] Vec2 forward() const;
  bool operator==(const RobotState&) const = default;
};

RobotState robot_state_from(const Pose2& pose);

enum class Action { Stop, MoveForward, TurnLeft, TurnRight, LookUp, LookDown };

std::string_view to_string(Action a);

struct ActionConfig {
  double forward_step = 0.1;
  int turn_deg = 1;
  int look_deg = 30;
  int pitch_limit_deg = 80;
  double robot_radius = 0.2;
};

struct StepResult {
  RobotState state;
  bool collided = false;
};

/// Disc of `radius` at `p` intersects a primitive footprint or leaves the floor.
bool collides(const SceneSpec& scene, const Vec2& p, double radius);

StepResult apply_action(const SceneSpec& scene, const RobotState& state, Action action,
                        const ActionConfig& cfg = {});

struct SweepConfig {
  double yaw_deg = 30.0;    // rotation to each side
  double pitch_deg = 60.0;  // downward tilt for the second row
};

/// Six captures at yaw offsets {−yaw, 0, +yaw} × pitch offsets {0, −pitch}. The
/// robot must already face `target` within 1° (throws Error(Precondition)).
/// Frames are indexed 1..6; the robot state is not modified.
std::vector<Frame> sweep_capture(const SceneSpec& scene, const RobotState& state, const Vec2& target,
                                 const SweepConfig& sweep, const CameraConfig& camera,
                                 Exec exec = Exec::Parallel);

/// Footprint boundary point along the operation direction pushed out by
/// robot_radius + clearance, heading toward the object centre.
/// Throws Error(NoOperationDirection) when the object has none.
Pose2 optimal_operation_pose(const SceneSpec& scene, int object_id, double robot_radius,
                             double clearance = 0.01);

/// Fallback for objects without an operation direction: the pose at
/// robot_radius + clearance from the footprint closest to `from`.
Pose2 nearest_operation_pose(const SceneSpec& scene, int object_id, const Vec2& from,
                             double robot_radius, double clearance = 0.01);

/// Cell (col, row) covers [origin + col·res, origin + (col+1)·res) on x, same on y.
class OccupancyMap {
 public:
  OccupancyMap() = default;
  OccupancyMap(const Vec2& origin, int width, int height, double resolution);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] double resolution() const noexcept { return resolution_; }
  [[nodiscard]] const Vec2& origin() const noexcept { return origin_; }
  [[nodiscard]] bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }
  [[nodiscard]] bool occupied(int col, int row) const { return cells_[index(col, row)] != 0; }
  void set_occupied(int col, int row, bool occ) { cells_[index(col, row)] = occ ? 1 : 0; }
  [[nodiscard]] std::optional<std::pair<int, int>> cell_of(const Vec2& p) const;
  [[nodiscard]] Vec2 cell_center(int col, int row) const {
    return origin_ + Vec2((col + 0.5) * resolution_, (row + 0.5) * resolution_);
  }
  [[nodiscard]] std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }
  [[nodiscard]] const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }
  [[nodiscard]] std::size_t occupied_count() const;
  [[nodiscard]] GrayImage to_gray() const;  // north-up, occupied black

 private:
  Vec2 origin_ = Vec2::Zero();
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.05;
  std::vector<std::uint8_t> cells_;
};

/// Cells whose open square overlaps any primitive footprint are occupied.
OccupancyMap build_occupancy_map(const SceneSpec& scene, double resolution = 0.05);

/// Pitch-0 captures at each pose, indexed 1..N.
std::vector<Frame> scene_image_set(const SceneSpec& scene, const std::vector<Pose2>& poses,
                                   const CameraConfig& camera, Exec exec = Exec::Parallel);

}  // namespace navgaze
