#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "navgaze/metrics.hpp"
#include "navgaze/pipeline.hpp"
#include "navgaze/scorer.hpp"

namespace navgaze {

struct SuiteItem {
  SceneSpec scene;
  TaskQuery query;
};

/// One item per scene using its first task. Throws Error(InvalidScene) for a scene without tasks.
std::vector<SuiteItem> suite_from_scenes(const std::vector<SceneSpec>& scenes);

/// Creates the scorer for one episode.
using ScorerFactory = std::function<std::unique_ptr<Scorer>(const SceneSpec& scene, std::uint64_t seed)>;

ScorerFactory oracle_factory(double robot_radius = 0.2, double epsilon = 0.01);

struct BenchmarkConfig {
  PipelineConfig pipeline;
  std::vector<Mode> modes{Mode::Full};
  /// Explicit seeds; when empty, seeds are pipeline.seed + k for k < repeats.
  std::vector<std::uint64_t> seeds;
  int repeats = 1;
  int jobs = 1;
  /// When set, each episode trace is written here and referenced by its row.
  std::optional<std::filesystem::path> trace_dir;

  [[nodiscard]] std::vector<std::uint64_t> effective_seeds() const;
};

struct Aggregate {
  std::size_t episodes = 0;
  double sr = 0.0;
  double spl = 0.0;
  double mean_dtg = 0.0;
  double mean_heading_error_deg = 0.0;
};

Aggregate aggregate(std::span<const EpisodeResult> rows);

struct BenchmarkReport {
  nlohmann::ordered_json config;
  /// Ordered by (suite item, mode, seed).
  std::vector<EpisodeResult> rows;

  [[nodiscard]] std::vector<EpisodeResult> rows_for(const std::string& mode) const;
  /// Keyed by mode name, then by scene name.
  [[nodiscard]] std::map<std::string, std::map<std::string, Aggregate>> per_scene() const;
  [[nodiscard]] std::map<std::string, Aggregate> per_mode() const;
};

/// Runs every (item, mode, seed) combination, in parallel when jobs > 1.
/// Episode failures become rows.
BenchmarkReport run_benchmark(const std::vector<SuiteItem>& suite, const ScorerFactory& factory,
                              const BenchmarkConfig& cfg);

/// Fixed-format CSV, one row per episode.
std::string report_csv(const BenchmarkReport& report);
/// Config echo, per-mode and per-scene aggregates.
nlohmann::ordered_json report_json(const BenchmarkReport& report);

struct Gates {
  std::optional<double> min_sr;
  std::optional<double> min_spl;
  std::optional<double> max_mean_dtg;
  bool fail_on_episode_error = false;
};

Gates gates_from_json(const nlohmann::json& j);

/// Human-readable descriptions of every violated gate (checked per mode).
std::vector<std::string> check_gates(const BenchmarkReport& report, const Gates& gates);

}  // namespace navgaze
