#include <doctest.h>

#include "navgaze/errors.hpp"
#include "navgaze/scene_gen.hpp"
#include "navgaze/simworld.hpp"

using namespace navgaze;

namespace {

Primitive box(int id, const std::string& label, Vec2 c, Vec3 size, double yaw = 0.0) {
  Primitive p;
  p.object_id = id;
  p.label = label;
  p.center = Vec3(c.x(), c.y(), size.z() / 2);
  p.size = size;
  p.yaw_deg = yaw;
  return p;
}

SceneSpec open_floor() {
  SceneSpec s;
  s.name = "t";
  s.floor = Eigen::AlignedBox2d(Vec2(-3, -3), Vec2(3, 3));
  return s;
}

}  // namespace

TEST_CASE("raycast hits an axis-aligned face") {
  SceneSpec s = open_floor();
  s.primitives.push_back(box(7, "box", Vec2(2.5, 0), Vec3(1, 1, 3)));
  CameraConfig cam;
  const auto k = cam.intrinsics();
  const auto f = capture_frame(s, camera_pose(Vec2(0, 0), 0, 0, 1.5), k);
  const int u = static_cast<int>(k.cx);
  const int v = static_cast<int>(k.cy);
  CHECK(f.depth_at(u, v) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(f.seg_at(u, v) == 7);
}

TEST_CASE("empty sky gives no depth") {
  const SceneSpec s = open_floor();
  CameraConfig cam;
  const auto f = capture_frame(s, camera_pose(Vec2(0, 0), 0, 60, 1.5), cam.intrinsics());
  for (float d : f.depth) CHECK(d == 0.0f);
  for (auto id : f.seg) CHECK(id == 0);
}

TEST_CASE("back-projected hits lie on a surface") {
  const SceneSpec s = generate_scene("cluttered", 4);
  CameraConfig cam;
  for (const auto& pose : s.capture_poses) {
    const auto f = capture_frame(s, camera_pose(pose.position, pose.heading_deg, -20, 1.5), cam.intrinsics());
    int checked = 0;
    for (int v = 0; v < f.height; v += 3) {
      for (int u = 0; u < f.width; u += 3) {
        if (f.depth_at(u, v) <= 0) continue;
        const Vec3 p = f.back_project(u, v, f.depth_at(u, v));
        const int id = f.seg_at(u, v);
        if (id == kFloorId) {
          CHECK(std::abs(p.z()) < 1e-6);
        } else {
          const Primitive* prim = s.find(id);
          REQUIRE(prim != nullptr);
          CHECK(prim->on_surface(p, 1e-6));
        }
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("discrete actions") {
  const SceneSpec s = open_floor();
  RobotState r;
  const auto fwd = apply_action(s, r, Action::MoveForward);
  CHECK(fwd.state.position.x() == doctest::Approx(0.1));
  CHECK(std::abs(fwd.state.position.y()) < 1e-12);
  CHECK_FALSE(fwd.collided);

  r.heading_deg = 359;
  CHECK(apply_action(s, r, Action::TurnLeft).state.heading_deg == 0);
  r.heading_deg = 0;
  CHECK(apply_action(s, r, Action::TurnRight).state.heading_deg == 359);
  CHECK(apply_action(s, r, Action::LookDown).state.pitch_deg == -30);

  SceneSpec walled = open_floor();
  walled.primitives.push_back(box(2, "wall", Vec2(0.3, 0), Vec3(0.1, 4, 2)));
  RobotState at;
  const auto blocked = apply_action(walled, at, Action::MoveForward);
  CHECK(blocked.collided);
  CHECK(blocked.state == at);
}

TEST_CASE("sweep poses follow the offset table") {
  const SceneSpec s = open_floor();
  RobotState r;
  r.position = Vec2(0.5, -0.2);
  r.heading_deg = 40;
  const Vec2 target = r.position + Vec2(std::cos(deg2rad(40)), std::sin(deg2rad(40)));
  CameraConfig cam;
  const auto frames = sweep_capture(s, r, target, {}, cam);
  REQUIRE(frames.size() == 6);
  int i = 0;
  for (double pitch : {0.0, -60.0}) {
    for (double yaw : {-30.0, 0.0, 30.0}) {
      const Pose3 expect = camera_pose(r.position, 40 + yaw, pitch, 1.5);
      CHECK(frames[i].index == i + 1);
      CHECK((frames[i].pose.matrix() - expect.matrix()).norm() < 1e-12);
      ++i;
    }
  }
  CHECK_THROWS_AS(sweep_capture(s, r, r.position - Vec2(1, 0), {}, cam), Error);
}

TEST_CASE("sweep covers ground in front of and beside the object") {
  SceneSpec s = open_floor();
  s.primitives.push_back(box(10, "cabinet", Vec2(1.5, 0), Vec3(0.5, 0.5, 1)));
  RobotState r;
  const auto frames = sweep_capture(s, r, Vec2(1.5, 0), {}, CameraConfig{});
  bool front = false, left = false, right = false;
  for (const auto& f : frames) {
    const auto cloud = frame_to_cloud(f, 10);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Vec3& p = cloud.points[i];
      if (std::abs(p.z()) > 1e-6) continue;
      if (p.x() > 0.8 && p.x() < 1.2 && std::abs(p.y()) < 0.2) front = true;
      if (p.x() > 1.3 && p.x() < 1.7 && p.y() > 0.35 && p.y() < 0.7) left = true;
      if (p.x() > 1.3 && p.x() < 1.7 && p.y() < -0.35 && p.y() > -0.7) right = true;
    }
  }
  CHECK(front);
  CHECK(left);
  CHECK(right);
}

TEST_CASE("optimal operation pose") {
  SceneSpec s = open_floor();
  Primitive disk;
  disk.object_id = 10;
  disk.label = "stool";
  disk.shape = ShapeKind::Cylinder;
  disk.size = Vec3(0.6, 0.6, 0.5);
  disk.center = Vec3(0, 0, 0.25);
  disk.operation_direction = Vec2(1, 0);
  s.primitives.push_back(disk);
  const auto p = optimal_operation_pose(s, 10, 0.2);
  CHECK(p.position.x() == doctest::Approx(0.51));
  CHECK(std::abs(p.position.y()) < 1e-12);
  CHECK(p.heading_deg == doctest::Approx(180));

  s.primitives[0].operation_direction = Vec2(0, 1);
  const auto q = optimal_operation_pose(s, 10, 0.2);
  CHECK(std::abs(q.position.x()) < 1e-12);
  CHECK(q.position.y() == doctest::Approx(0.51));

  s.primitives[0].operation_direction.reset();
  CHECK_THROWS_AS(optimal_operation_pose(s, 10, 0.2), Error);
  const auto n = nearest_operation_pose(s, 10, Vec2(-2, 0), 0.2);
  CHECK(n.position.x() == doctest::Approx(-0.51));
}

TEST_CASE("occupancy map") {
  SceneSpec s = open_floor();
  CHECK(build_occupancy_map(s, 0.05).occupied_count() == 0);
  s.primitives.push_back(box(3, "crate", Vec2(0, 0), Vec3(1, 1, 1)));
  const auto m = build_occupancy_map(s, 0.05);
  CHECK(m.occupied_count() == 400);

  const SceneSpec c = generate_scene("cluttered", 2);
  const auto cm = build_occupancy_map(c, 0.05);
  for (int r = 0; r < cm.height(); ++r) {
    for (int col = 0; col < cm.width(); ++col) {
      if (!cm.occupied(col, r)) continue;
      const Vec2 p = cm.cell_center(col, r);
      double best = 1e9;
      for (const auto& prim : c.primitives) best = std::min(best, prim.signed_footprint_distance(p));
      CHECK(best <= 0.05 * std::sqrt(0.5) + 1e-9);
    }
  }
}

TEST_CASE("scene image set") {
  const SceneSpec s = generate_scene("open-room", 1);
  REQUIRE(s.capture_poses.size() == 8);
  const auto frames = scene_image_set(s, s.capture_poses, CameraConfig{});
  REQUIRE(frames.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(frames[i].index == static_cast<int>(i) + 1);
    const auto expect = camera_pose(s.capture_poses[i].position, s.capture_poses[i].heading_deg, 0, 1.5);
    CHECK((frames[i].pose.matrix() - expect.matrix()).norm() < 1e-12);
  }
  CHECK(scene_image_set(s, {}, CameraConfig{}).empty());

  // A frame whose view cone misses every corner of the target has no pixel of it.
  const Primitive* target = s.find_label(s.tasks.front().label);
  REQUIRE(target);
  for (const auto& f : frames) {
    bool any_corner = false;
    for (int dx : {-1, 1})
      for (int dy : {-1, 1})
        for (int dz : {0, 1}) {
          const Vec3 corner = target->center + Vec3(dx * target->half().x(), dy * target->half().y(), (dz - 0.5) * target->size.z());
          const auto px = f.project(corner);
          if (px && px->x() >= 0 && px->x() < f.width && px->y() >= 0 && px->y() < f.height) any_corner = true;
        }
    const double heading = std::atan2(f.pose.linear()(1, 2), f.pose.linear()(0, 2));
    const Vec2 fwd(std::cos(heading), std::sin(heading));
    const bool behind = (target->center2d() - f.camera_position().head<2>()).dot(fwd) < -1.5;
    if (!any_corner && behind) CHECK(f.pixel_count(target->object_id) == 0);
  }
}

TEST_CASE("scene validation") {
  SceneSpec s = open_floor();
  s.primitives.push_back(box(3, "a", Vec2(1, 1), Vec3(1, 1, 1)));
  s.primitives.push_back(box(3, "b", Vec2(-1, 1), Vec3(1, 1, 1)));
  CHECK_THROWS_AS(s.validate(0.2), Error);
  s.primitives[1].object_id = 4;
  CHECK_NOTHROW(s.validate(0.2));
  s.start.position = Vec2(1, 1);
  CHECK_THROWS_AS(s.validate(0.2), Error);
}
