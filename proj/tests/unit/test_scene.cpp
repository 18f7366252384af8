#include <doctest.h>

#include <filesystem>

#include "navgaze/candidates.hpp"
#include "navgaze/errors.hpp"
#include "navgaze/scene_gen.hpp"
#include "navgaze/scene_io.hpp"

using namespace navgaze;

TEST_CASE("scene json round trip") {
  for (const auto& t : scene_templates()) {
    const SceneSpec s = generate_scene(t, 11);
    const std::string text = dump_scene(s);
    const SceneSpec back = scene_from_json(nlohmann::json::parse(text));
    CHECK(dump_scene(back) == text);
    CHECK(back.primitives.size() == s.primitives.size());
  }
  const auto path = std::filesystem::temp_directory_path() / "navgaze_scene_rt.json";
  const SceneSpec s = generate_scene("corner-object", 4);
  save_scene(path, s);
  CHECK(dump_scene(load_scene(path)) == dump_scene(s));
  std::filesystem::remove(path);
}

TEST_CASE("scene json errors name the field") {
  try {
    scene_from_json(nlohmann::json::parse(R"({"name":"x","floor":{"min":[0,0],"max":[1,1]}})"));
    FAIL("expected InvalidScene");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidScene);
    CHECK(std::string(e.what()).find("start") != std::string::npos);
  }
}

TEST_CASE("generation is deterministic") {
  CHECK(dump_scene(generate_scene("cluttered", 5)) == dump_scene(generate_scene("cluttered", 5)));
  CHECK(dump_scene(generate_scene("cluttered", 5)) != dump_scene(generate_scene("cluttered", 6)));
  CHECK_THROWS_AS(generate_scene("castle", 1), Error);
}

TEST_CASE("wall-backed fridge faces away from its wall") {
  const SceneSpec s = generate_scene("wall-backed-object", 7);
  const Primitive* t = s.find_label(s.tasks[0].label);
  REQUIRE(t);
  REQUIRE(t->operation_direction);
  const Vec2 op = *t->operation_direction;
  const Vec2 back = t->center2d() - op * (t->boundary_along(-op) + 0.02);
  bool wall_behind = false;
  for (const auto& p : s.primitives) {
    if (p.object_id == t->object_id) continue;
    if (p.signed_footprint_distance(back) <= 0.0) wall_behind = p.label == "wall";
  }
  CHECK(wall_behind);
  const Vec2 front = t->center2d() + op * (t->boundary_along(op) + 0.5);
  for (const auto& p : s.primitives) CHECK(p.signed_footprint_distance(front) > 0.0);
}

TEST_CASE("suites") {
  const auto r = reachable_suite(8, 1);
  CHECK(r.size() == 8);
  for (const auto& s : r) {
    CHECK_NOTHROW(s.validate(0.2));
    CHECK_FALSE(s.tasks.empty());
  }
  const auto sb = side_back_suite(4, 1);
  for (const auto& s : sb) {
    const Primitive* t = s.find_label(s.tasks[0].label);
    REQUIRE(t);
    CHECK((s.start.position - t->center2d()).dot(*t->operation_direction) <= 0.0);
    for (const auto& c : s.capture_poses) CHECK((c.position - t->center2d()).dot(*t->operation_direction) < 0.0);
  }
  CHECK(ablation_suite(6, 1).size() == 6);
}
