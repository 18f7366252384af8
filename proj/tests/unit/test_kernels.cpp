#include <doctest.h>

#include <random>

#include "navgaze/kernels.hpp"
#include "navgaze/scene_gen.hpp"
#include "oracles.hpp"

using namespace navgaze;

TEST_CASE("plane inlier counting") {
  const auto c = oracle::outlier_plane(2);
  const Vec3 n = Vec3(0.01, 0.02, 1).normalized();
  const auto s = kernels::count_plane_inliers_serial(c.points, n, 0.001, 0.01);
  CHECK(kernels::count_plane_inliers_omp(c.points, n, 0.001, 0.01) == s);
  std::size_t brute = 0;
  for (const auto& p : c.points) brute += std::abs(n.dot(p) + 0.001) <= 0.01 ? 1 : 0;
  CHECK(s == brute);
}

TEST_CASE("raycast") {
  const SceneSpec sc = generate_scene("cluttered", 3);
  CameraConfig cam;
  const auto k = cam.intrinsics();
  const std::size_t n = static_cast<std::size_t>(k.width) * k.height;
  for (const auto& p : sc.capture_poses) {
    const Pose3 pose = camera_pose(p.position, p.heading_deg, -30, 1.5);
    std::vector<float> d1(n), d2(n);
    std::vector<std::int32_t> s1(n), s2(n);
    kernels::raycast_serial(sc, pose, k, d1, s1);
    kernels::raycast_omp(sc, pose, k, d2, s2);
    CHECK(d1 == d2);
    CHECK(s1 == s2);
  }
}

TEST_CASE("band mask") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> obj, centers;
  for (int i = 0; i < 300; ++i) obj.emplace_back(0.3 * u(rng), 0.3 * u(rng));
  for (int i = 0; i < 3000; ++i) centers.emplace_back(u(rng), u(rng));
  const SpatialIndex2D idx(obj);
  const auto a = kernels::band_mask_serial(centers, idx, 0.1, 0.3);
  CHECK(kernels::band_mask_omp(centers, idx, 0.1, 0.3) == a);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = oracle::min_distance(obj, centers[i]);
    CHECK(a[i] == ((d >= 0.1 && d <= 0.3) ? 1 : 0));
  }
}

TEST_CASE("inflation") {
  const auto m = oracle::random_map(8, 80);
  const auto a = kernels::inflate_serial(m, 0.275);
  CHECK(kernels::inflate_omp(m, 0.275) == a);
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      bool near = false;
      for (int rr = 0; rr < m.height() && !near; ++rr)
        for (int cc = 0; cc < m.width() && !near; ++cc)
          near = m.occupied(cc, rr) && (m.cell_center(cc, rr) - m.cell_center(c, r)).norm() < 0.275;
      CHECK(a[m.index(c, r)] == (near ? 1 : 0));
    }
  }
}
