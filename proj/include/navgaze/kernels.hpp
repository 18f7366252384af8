#pragma once

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version that must produce identical output; the tests compare them
// and bench/ times them against each other.

#include <cstdint>
#include <span>
#include <vector>

#include "navgaze/geometry.hpp"
#include "navgaze/simworld.hpp"
#include "navgaze/spatial_index.hpp"

namespace navgaze::kernels {

/// Number of points with |n·p + d| <= tol.
std::size_t count_plane_inliers_serial(std::span<const Vec3> points, const Vec3& normal, double d,
                                       double tol);
std::size_t count_plane_inliers_omp(std::span<const Vec3> points, const Vec3& normal, double d,
                                    double tol);

/// Fills depth/seg (row-major, width·height) by casting one ray per pixel.
void raycast_serial(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& k,
                    std::span<float> depth, std::span<std::int32_t> seg);
void raycast_omp(const SceneSpec& scene, const Pose3& camera, const CameraIntrinsics& k,
                 std::span<float> depth, std::span<std::int32_t> seg);

/// mask[i] = 1 when lo <= distance(centers[i], nearest indexed point) <= hi.
std::vector<std::uint8_t> band_mask_serial(std::span<const Vec2> centers, const SpatialIndex2D& index,
                                           double lo, double hi);
std::vector<std::uint8_t> band_mask_omp(std::span<const Vec2> centers, const SpatialIndex2D& index,
                                        double lo, double hi);

/// blocked[i] = 1 when cell i is outside free space once every occupied cell
/// centre is grown by `radius` (strictly closer than radius counts as blocked).
std::vector<std::uint8_t> inflate_serial(const OccupancyMap& map, double radius);
std::vector<std::uint8_t> inflate_omp(const OccupancyMap& map, double radius);

}  // namespace navgaze::kernels
