#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "navgaze/simworld.hpp"

namespace navgaze {

nlohmann::ordered_json to_json(const SceneSpec& scene);
nlohmann::ordered_json to_json(const Pose2& pose);
Pose2 pose2_from_json(const nlohmann::json& j);

/// Throws Error(InvalidScene) naming the offending field.
SceneSpec scene_from_json(const nlohmann::json& j);

/// Two-space indented, trailing newline. Identical scenes give identical bytes.
std::string dump_scene(const SceneSpec& scene);
void save_scene(const std::filesystem::path& path, const SceneSpec& scene);
SceneSpec load_scene(const std::filesystem::path& path);

}  // namespace navgaze
