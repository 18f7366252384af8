#include "navgaze/kernels.hpp"

#include <cmath>
#include <limits>

namespace navgaze::kernels {

std::size_t count_plane_inliers_serial(std::span<const Vec3> points, const Vec3& normal, double d,
                                       double tol) {
  std::size_t count = 0;
  for (const auto& p : points) {
    if (std::abs(normal.dot(p) + d) <= tol) ++count;
  }
  return count;
}

std::size_t count_plane_inliers_omp(std::span<const Vec3> points, const Vec3& normal, double d,
                                    double tol) {
  const auto n = static_cast<std::int64_t>(points.size());
  std::int64_t count = 0;
#pragma omp parallel for reduction(+ : count) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (std::abs(normal.dot(points[i]) + d) <= tol) ++count;
  }
  return static_cast<std::size_t>(count);
}

namespace {

inline void cast_pixel(const SceneSpec& scene, const Vec3& origin, const Eigen::Matrix3d& rot,
                       const CameraIntrinsics& k, int u, int v, float& depth, std::int32_t& seg) {
  const Vec3 dir = rot * Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
  double best = std::numeric_limits<double>::infinity();
  int hit = 0;
  for (const auto& prim : scene.primitives) {
    if (auto t = prim.intersect(origin, dir); t && *t < best) {
      best = *t;
      hit = prim.object_id;
    }
  }
  if (dir.z() < -1e-12) {
    const double t = -origin.z() / dir.z();
    if (t > 1e-9 && t < best) {
      const Vec3 p = origin + t * dir;
      if (scene.floor.contains(p.head<2>())) {
        best = t;
        hit = kFloorId;
      }
    }
  }
  // dir has unit optical-axis component, so t is the z-depth.
  depth = hit ? static_cast<float>(best) : 0.0f;
  seg = hit;
}

}  // namespace

void raycast_serial(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& k,
                    std::span<float> depth, std::span<std::int32_t> seg) {
  const Vec3 origin = camera.translation();
  const Eigen::Matrix3d rot = camera.linear();
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * k.width + u;
      cast_pixel(scene, origin, rot, k, u, v, depth[i], seg[i]);
    }
  }
}

void raycast_omp(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& k,
                 std::span<float> depth, std::span<std::int32_t> seg) {
  const Vec3 origin = camera.translation();
  const Eigen::Matrix3d rot = camera.linear();
#pragma omp parallel for schedule(dynamic, 4)
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * k.width + u;
      cast_pixel(scene, origin, rot, k, u, v, depth[i], seg[i]);
    }
  }
}

std::vector<std::uint8_t> band_mask_serial(std::span<const Vec2> centers, const SpatialIndex2D& index,
                                           double lo, double hi) {
  std::vector<std::uint8_t> mask(centers.size(), 0);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = index.nearest(centers[i]).distance;
    mask[i] = (d >= lo && d <= hi) ? 1 : 0;
  }
  return mask;
}

std::vector<std::uint8_t> band_mask_omp(std::span<const Vec2> centers, const SpatialIndex2D& index,
                                        double lo, double hi) {
  std::vector<std::uint8_t> mask(centers.size(), 0);
  const auto n = static_cast<std::int64_t>(centers.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    const double d = index.nearest(centers[i]).distance;
    mask[i] = (d >= lo && d <= hi) ? 1 : 0;
  }
  return mask;
}

namespace {

struct Offset {
  int dc;
  int dr;
};

std::vector<Offset> disk_stencil(double radius, double res) {
  std::vector<Offset> out;
  const int reach = static_cast<int>(std::ceil(radius / res));
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double dist = std::hypot(dc * res, dr * res);
      if (dist < radius) out.push_back({dc, dr});
    }
  }
  return out;
}

inline std::uint8_t blocked_at(const OccupancyMap& map, const std::vector<Offset>& stencil, int col,
                               int row) {
  for (const auto& o : stencil) {
    const int c = col + o.dc;
    const int r = row + o.dr;
    if (map.in_bounds(c, r) && map.occupied(c, r)) return 1;
  }
  return 0;
}

}  // namespace

std::vector<std::uint8_t> inflate_serial(const OccupancyMap& map, double radius) {
  const auto stencil = disk_stencil(radius, map.resolution());
  std::vector<std::uint8_t> blocked(map.cells().size(), 0);
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      blocked[map.index(col, row)] = map.occupied(col, row) ? 1 : blocked_at(map, stencil, col, row);
    }
  }
  return blocked;
}

std::vector<std::uint8_t> inflate_omp(const OccupancyMap& map, double radius) {
  const auto stencil = disk_stencil(radius, map.resolution());
  std::vector<std::uint8_t> blocked(map.cells().size(), 0);
#pragma omp parallel for schedule(static)
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      blocked[map.index(col, row)] = map.occupied(col, row) ? 1 : blocked_at(map, stencil, col, row);
    }
  }
  return blocked;
}

}  // namespace navgaze::kernels
