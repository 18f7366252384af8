#include "navgaze/evalbench.hpp"

#include <cstdio>
#include <fstream>

#include <omp.h>

#include "navgaze/errors.hpp"

namespace navgaze {

std::vector<SuiteItem> suite_from_scenes(const std::vector<SceneSpec>& scenes) {
  std::vector<SuiteItem> out;
  for (const auto& s : scenes) {
    if (s.tasks.empty()) throw Error(ErrorCode::InvalidScene, "scene '" + s.name + "' has no tasks");
    out.push_back({s, {s.tasks.front().text, s.tasks.front().label}});
  }
  return out;
}

ScorerFactory oracle_factory(double robot_radius, double epsilon) {
  return [robot_radius, epsilon](const SceneSpec& scene, std::uint64_t) -> std::unique_ptr<Scorer> {
    return std::make_unique<OracleScorer>(scene, robot_radius, epsilon);
  };
}

std::vector<std::uint64_t> BenchmarkConfig::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out;
  for (int k = 0; k < std::max(repeats, 1); ++k) out.push_back(pipeline.seed + static_cast<std::uint64_t>(k));
  return out;
}

Aggregate aggregate(std::span<const EpisodeResult> rows) {
  Aggregate a;
  a.episodes = rows.size();
  if (rows.empty()) return a;
  a.sr = compute_sr(rows);
  a.spl = compute_spl(rows);
  a.mean_dtg = mean_dtg(rows);
  double h = 0.0;
  for (const auto& r : rows) h += r.heading_error_deg;
  a.mean_heading_error_deg = h / static_cast<double>(rows.size());
  return a;
}

std::vector<EpisodeResult> BenchmarkReport::rows_for(const std::string& mode) const {
  std::vector<EpisodeResult> out;
  for (const auto& r : rows) {
    if (r.mode == mode) out.push_back(r);
  }
  return out;
}

std::map<std::string, std::map<std::string, Aggregate>> BenchmarkReport::per_scene() const {
  std::map<std::string, std::map<std::string, std::vector<EpisodeResult>>> groups;
  for (const auto& r : rows) groups[r.mode][r.scene].push_back(r);
  std::map<std::string, std::map<std::string, Aggregate>> out;
  for (const auto& [mode, scenes] : groups) {
    for (const auto& [scene, rs] : scenes) out[mode][scene] = aggregate(rs);
  }
  return out;
}

std::map<std::string, Aggregate> BenchmarkReport::per_mode() const {
  std::map<std::string, std::vector<EpisodeResult>> groups;
  for (const auto& r : rows) groups[r.mode].push_back(r);
  std::map<std::string, Aggregate> out;
  for (const auto& [mode, rs] : groups) out[mode] = aggregate(rs);
  return out;
}

namespace {

std::string trace_name(const EpisodeResult& r, std::size_t job) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%05zu", job);
  return std::string(buf) + "_" + r.scene + "_" + r.mode + "_" + std::to_string(r.seed) + ".jsonl";
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<SuiteItem>& suite, const ScorerFactory& factory,
                              const BenchmarkConfig& cfg) {
  if (suite.empty()) throw Error(ErrorCode::InvalidConfig, "suite: no scenes to run");
  cfg.pipeline.validate();
  const auto seeds = cfg.effective_seeds();
  struct Job {
    std::size_t item;
    Mode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (Mode m : cfg.modes) {
      for (auto s : seeds) jobs.push_back({i, m, s});
    }
  }
  if (cfg.trace_dir) std::filesystem::create_directories(*cfg.trace_dir);

  BenchmarkReport report;
  report.rows.resize(jobs.size());
  const int n = static_cast<int>(jobs.size());
  const int threads = std::max(1, cfg.jobs);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int k = 0; k < n; ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    const SuiteItem& item = suite[job.item];
    PipelineConfig pc = cfg.pipeline;
    pc.mode = job.mode;
    pc.seed = job.seed;
    if (threads > 1) pc.exec = Exec::Serial;
    EpisodeResult row;
    try {
      auto scorer = factory(item.scene, job.seed);
      auto out = run_episode(item.scene, item.query, *scorer, pc);
      row = std::move(out.result);
      if (cfg.trace_dir) {
        row.trace_ref = trace_name(row, static_cast<std::size_t>(k));
        std::ofstream(*cfg.trace_dir / row.trace_ref, std::ios::binary) << out.trace.to_jsonl();
      }
    } catch (const std::exception& e) {
      row.scene = item.scene.name;
      row.query = item.query.text;
      row.mode = std::string(to_string(job.mode));
      row.seed = job.seed;
      row.failure = e.what();
      row.dtg = std::numeric_limits<double>::infinity();
    }
    report.rows[static_cast<std::size_t>(k)] = std::move(row);
  }

  nlohmann::ordered_json c = to_json(cfg.pipeline);
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  for (Mode m : cfg.modes) modes.push_back(to_string(m));
  c["modes"] = modes;
  c["seeds"] = seeds;
  c["scenes"] = suite.size();
  report.config = std::move(c);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

nlohmann::ordered_json agg_json(const Aggregate& a) {
  return {{"episodes", a.episodes},
          {"sr", a.sr},
          {"spl", a.spl},
          {"mean_dtg", a.mean_dtg},
          {"mean_heading_error_deg", a.mean_heading_error_deg}};
}

}  // namespace

std::string report_csv(const BenchmarkReport& report) {
  std::string out =
      "scene,query,mode,seed,success,shortest_length,traveled,dtg,heading_error_deg,final_x,final_y,"
      "final_heading_deg,optimal_x,optimal_y,collisions,failure\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.scene) + "," + csv_field(r.query) + "," + r.mode + "," + std::to_string(r.seed) + "," +
           (r.success ? "1" : "0") + "," + fmt(r.shortest_length) + "," + fmt(r.traveled) + "," + fmt(r.dtg) + "," +
           fmt(r.heading_error_deg) + "," + fmt(r.final_pose.position.x()) + "," + fmt(r.final_pose.position.y()) +
           "," + fmt(r.final_pose.heading_deg) + "," + fmt(r.optimal_pose.position.x()) + "," +
           fmt(r.optimal_pose.position.y()) + "," + std::to_string(r.collisions) + "," +
           csv_field(r.failure.value_or("")) + "\n";
  }
  return out;
}

nlohmann::ordered_json report_json(const BenchmarkReport& report) {
  nlohmann::ordered_json j;
  j["config"] = report.config;
  nlohmann::ordered_json modes;
  for (const auto& [m, a] : report.per_mode()) modes[m] = agg_json(a);
  j["modes"] = modes;
  nlohmann::ordered_json scenes;
  for (const auto& [m, per] : report.per_scene()) {
    for (const auto& [s, a] : per) scenes[m][s] = agg_json(a);
  }
  j["scenes"] = scenes;
  j["episodes"] = report.rows.size();
  return j;
}

Gates gates_from_json(const nlohmann::json& j) {
  Gates g;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "gates: expected an object");
  const auto opt = [&](const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw Error(ErrorCode::InvalidConfig, std::string("gates.") + key + ": expected a number");
    out = j[key].get<double>();
  };
  opt("min_sr", g.min_sr);
  opt("min_spl", g.min_spl);
  opt("max_mean_dtg", g.max_mean_dtg);
  g.fail_on_episode_error = j.value("fail_on_episode_error", false);
  return g;
}

std::vector<std::string> check_gates(const BenchmarkReport& report, const Gates& gates) {
  std::vector<std::string> out;
  for (const auto& [mode, a] : report.per_mode()) {
    if (gates.min_sr && a.sr < *gates.min_sr) out.push_back(mode + ": SR " + fmt(a.sr) + " < " + fmt(*gates.min_sr));
    if (gates.min_spl && a.spl < *gates.min_spl) {
      out.push_back(mode + ": SPL " + fmt(a.spl) + " < " + fmt(*gates.min_spl));
    }
    if (gates.max_mean_dtg && a.mean_dtg > *gates.max_mean_dtg) {
      out.push_back(mode + ": mean DTG " + fmt(a.mean_dtg) + " > " + fmt(*gates.max_mean_dtg));
    }
  }
  if (gates.fail_on_episode_error) {
    for (const auto& r : report.rows) {
      if (r.failure) out.push_back(r.scene + "/" + r.mode + "/" + std::to_string(r.seed) + ": " + *r.failure);
    }
  }
  return out;
}

}  // namespace navgaze
