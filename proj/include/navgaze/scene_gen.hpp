#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "navgaze/simworld.hpp"

namespace navgaze {

struct SceneGenParams {
  double room_size = 6.5;       // square room edge, walls included
  double wall_height = 2.5;
  double capture_ring = 1.2;    // radius of the outward-facing capture poses
  int capture_count = 8;
  int clutter = 5;              // extra obstacles for the cluttered template
};

/// open-room, wall-backed-object, corner-object, enclosed-object, cluttered.
const std::vector<std::string>& scene_templates();

/// Deterministic per (template, seed). The first task names the target object.
/// Throws Error(UnknownTemplate).
SceneSpec generate_scene(const std::string& template_name, std::uint64_t seed, const SceneGenParams& params = {});

/// Target stands in the open with its front facing away from every capture
/// pose, so the front is hidden from the first viewpoint.
SceneSpec generate_back_facing_scene(std::uint64_t seed, const SceneGenParams& params = {});

/// Scenes whose target front is reachable: open-room, wall-backed, corner and
/// cluttered layouts in rotation.
std::vector<SceneSpec> reachable_suite(int count, std::uint64_t seed);

/// Start pose and capture poses all lie behind or beside the target.
std::vector<SceneSpec> side_back_suite(int count, std::uint64_t seed);

/// Half reachable scenes, half back-facing scenes.
std::vector<SceneSpec> ablation_suite(int count, std::uint64_t seed);

}  // namespace navgaze
