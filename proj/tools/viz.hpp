#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "navgaze/pipeline.hpp"
#include "navgaze/simworld.hpp"

namespace navgaze::viz {

/// Files written by render().
struct Outputs {
  std::vector<std::filesystem::path> files;
  std::size_t circles = 0;
};

/// Always writes occupancy.pgm and scene.svg; with a trace also taskgrid.ppm
/// (when the trace holds a grid snapshot) and overlay.svg.
Outputs render(const SceneSpec& scene, const EpisodeTrace* trace, const std::filesystem::path& out_dir,
               double map_resolution = 0.05);

}  // namespace navgaze::viz
