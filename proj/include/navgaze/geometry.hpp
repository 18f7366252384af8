#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace navgaze {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Pose3 = Eigen::Isometry3d;

enum class PointLabel : std::uint8_t { Other = 0, Object = 1 };

/// Points in the world frame (meters). Labels are optional; when present
/// there is exactly one per point.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<PointLabel> labels;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] bool empty() const noexcept { return points.empty(); }
  [[nodiscard]] bool has_labels() const noexcept { return !labels.empty(); }

  void push_back(const Vec3& p) { points.push_back(p); }
  void push_back(const Vec3& p, PointLabel label) {
    points.push_back(p);
    labels.push_back(label);
  }
  void append(const PointCloud& other);

  /// Throws InvalidConfig on non-finite coordinates or a label count mismatch.
  void validate() const;
};

/// Hessian normal form n·x + d = 0 with |n| = 1.
struct PlaneModel {
  Vec3 normal{0.0, 0.0, 1.0};
  double d = 0.0;
  std::vector<std::size_t> inliers;

  [[nodiscard]] double signed_distance(const Vec3& p) const { return normal.dot(p) + d; }
  [[nodiscard]] double distance(const Vec3& p) const { return std::abs(signed_distance(p)); }
};

struct RansacParams {
  int iterations = 500;
  double inlier_tol = 0.01;
  bool refit = true;
  /// When set, hypotheses whose normal leans further than this from world z are skipped.
  std::optional<double> max_tilt_deg;
};

enum class Exec { Serial, Parallel };

/// RANSAC ground plane. Hypotheses are drawn from a generator seeded with
/// `seed`, so identical (cloud, seed) pairs give identical models. The winner
/// is refit by least squares on its inliers and the inlier set recomputed
/// against the refit plane. The normal is flipped to point world-up.
PlaneModel fit_ground_plane(const PointCloud& cloud, const RansacParams& params,
                            std::uint64_t seed, Exec exec = Exec::Parallel);

/// Least-squares plane through the given points (smallest-eigenvalue
/// direction of the scatter matrix). Inliers are left empty.
PlaneModel fit_plane_least_squares(const std::vector<Vec3>& points);

/// Fixed 2D frame on a plane: origin is the foot of the world origin, `u`
/// follows world x projected onto the plane (world y if x is parallel to the
/// normal), and v = normal × u.
struct GroundFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 u = Vec3::UnitX();
  Vec3 v = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();

  static GroundFrame from_plane(const PlaneModel& plane);

  [[nodiscard]] Vec2 project(const Vec3& p) const {
    const Vec3 rel = p - origin;
    return {rel.dot(u), rel.dot(v)};
  }
  [[nodiscard]] Vec3 lift(const Vec2& q) const { return origin + u * q.x() + v * q.y(); }
};

std::vector<Vec2> project_to_ground(const PointCloud& cloud, const PlaneModel& plane);

PointCloud transform_cloud(const PointCloud& cloud, const Pose3& pose);

/// Whitespace-delimited "x y z [label]" lines; label is 0 (other) or 1 (object).
void write_xyz(std::ostream& out, const PointCloud& cloud);
PointCloud read_xyz(std::istream& in);

/// Wraps an angle in degrees to [0, 360).
double wrap_degrees(double deg);
/// Signed difference target − current wrapped to (−180, 180].
double signed_angle_deg(double from_deg, double to_deg);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace navgaze
