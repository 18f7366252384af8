#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "navgaze/errors.hpp"
#include "navgaze/evalbench.hpp"
#include "navgaze/pipeline.hpp"
#include "navgaze/remote_scorer.hpp"
#include "navgaze/scene_gen.hpp"
#include "navgaze/scene_io.hpp"
#include "navgaze/scorer.hpp"
#include "viz.hpp"

namespace fs = std::filesystem;
using namespace navgaze;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + p.string());
  out << text;
}

/// Options shared by run, bench and ablate.
struct Common {
  std::string config_path;
  std::string scorer = "oracle";
  std::string mode = "full";
  std::uint64_t seed = 0;
  std::string out = "runs";
  std::string run_name;
  double threshold = 0.5;
  int jobs = 1;
  double timeout = 30.0;
  int retries = 2;
  bool seed_set = false;
  bool threshold_set = false;
  bool mode_set = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_mode) {
  cmd->add_option("--config", c.config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  cmd->add_option("--scorer", c.scorer, "oracle | scripted:<log> | remote:<url>");
  if (with_mode) {
    cmd->add_option_function<std::string>("--mode", [&c](const std::string& m) { c.mode = m; c.mode_set = true; },
                                          "full | dnt | ogd | norts");
  }
  cmd->add_option_function<std::uint64_t>("--seed", [&c](std::uint64_t s) { c.seed = s; c.seed_set = true; },
                                          "episode seed");
  cmd->add_option("--out", c.out, "parent directory for the run directory");
  cmd->add_option("--run-name", c.run_name, "run directory name (default: timestamp)");
  cmd->add_option_function<double>("--threshold", [&c](double t) { c.threshold = t; c.threshold_set = true; },
                                    "success threshold on DTG in meters");
  cmd->add_option("--jobs", c.jobs, "parallel episodes")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", c.timeout, "remote scorer timeout in seconds");
  cmd->add_option("--retries", c.retries, "remote scorer retries");
}

json load_config(const Common& c) {
  if (c.config_path.empty()) return json::object();
  try {
    return json::parse(read_text(c.config_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, c.config_path + ": " + e.what());
  }
}

PipelineConfig pipeline_config(const Common& c, const json& file) {
  PipelineConfig cfg = pipeline_config_from_json(file.value("pipeline", json::object()));
  if (file.contains("seed") && !c.seed_set) cfg.seed = file["seed"].get<std::uint64_t>();
  if (c.seed_set) cfg.seed = c.seed;
  if (file.contains("mode") && !c.mode_set) cfg.mode = mode_from_string(file["mode"].get<std::string>());
  if (c.mode_set) cfg.mode = mode_from_string(c.mode);
  if (file.contains("threshold") && !c.threshold_set) cfg.success_threshold = file["threshold"].get<double>();
  if (c.threshold_set) cfg.success_threshold = c.threshold;
  cfg.validate();
  return cfg;
}

std::string scorer_spec(const Common& c, const json& file) {
  if (c.scorer != "oracle" || !file.contains("scorer")) return c.scorer;
  return file["scorer"].get<std::string>();
}

ScorerFactory make_factory(const std::string& spec, const PipelineConfig& cfg, const Common& c) {
  if (spec == "oracle") return oracle_factory(cfg.robot_radius, cfg.epsilon);
  if (spec.rfind("scripted:", 0) == 0) {
    const fs::path log = spec.substr(9);
    if (!fs::exists(log)) throw Error(ErrorCode::InvalidConfig, "scorer: decision log " + log.string() + " not found");
    return [log](const SceneSpec&, std::uint64_t) -> std::unique_ptr<Scorer> {
      std::ifstream in(log, std::ios::binary);
      return std::make_unique<ScriptedScorer>(in);
    };
  }
  if (spec.rfind("remote:", 0) == 0) {
    const std::string url = spec.substr(7);
    RemoteOptions opts{c.timeout, c.retries};
    RemoteScorer probe(url, opts);  // validates the URL
    return [url, opts](const SceneSpec&, std::uint64_t) -> std::unique_ptr<Scorer> {
      return std::make_unique<RemoteScorer>(url, opts);
    };
  }
  throw Error(ErrorCode::InvalidConfig, "scorer: expected oracle, scripted:<log> or remote:<url>, got '" + spec + "'");
}

fs::path make_run_dir(const Common& c, const std::string& command) {
  const fs::path dir = fs::path(c.out) / (c.run_name.empty() ? timestamp() + "-" + command : c.run_name);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& argv,
                    const ordered_json& config, const std::vector<std::string>& files) {
  ordered_json m;
  m["tool"] = "navgaze";
  m["command"] = command;
  m["argv"] = argv;
  m["created"] = timestamp();
  m["config"] = config;
  m["files"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

TaskQuery resolve_query(const SceneSpec& scene, const std::string& query) {
  if (query.empty()) {
    if (scene.tasks.empty()) throw Error(ErrorCode::InvalidConfig, "query: scene has no tasks, pass --query");
    return {scene.tasks.front().text, scene.tasks.front().label};
  }
  for (const auto& t : scene.tasks) {
    if (t.text == query || t.label == query) return {t.text, t.label};
  }
  return {query, query};
}

bool infrastructure_failure(const EpisodeResult& r) {
  if (!r.failure) return false;
  const std::string& f = *r.failure;
  for (ErrorCode c : {ErrorCode::Transport, ErrorCode::Malformed, ErrorCode::LengthMismatch,
                      ErrorCode::ScriptExhausted, ErrorCode::MalformedTrace}) {
    if (f.rfind(std::string(to_string(c)), 0) == 0) return true;
  }
  return false;
}

int cmd_gen_scene(const std::string& tmpl, std::uint64_t seed, const std::string& out, const std::string& suite,
                  int count) {
  if (!suite.empty()) {
    std::vector<SceneSpec> scenes;
    if (suite == "reachable") scenes = reachable_suite(count, seed);
    else if (suite == "side-back") scenes = side_back_suite(count, seed);
    else if (suite == "ablation") scenes = ablation_suite(count, seed);
    else throw Error(ErrorCode::InvalidConfig, "suite: expected reachable, side-back or ablation");
    fs::create_directories(out);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%03zu_", i);
      save_scene(fs::path(out) / (name + scenes[i].name + ".json"), scenes[i]);
    }
    std::cout << "wrote " << scenes.size() << " scenes to " << out << "\n";
    return kExitOk;
  }
  const SceneSpec scene = generate_scene(tmpl, seed);
  if (out.empty() || out == "-") {
    std::cout << dump_scene(scene);
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    save_scene(out, scene);
    std::cout << "wrote " << out << "\n";
  }
  return kExitOk;
}

int cmd_run(const Common& c, const std::string& scene_path, const std::string& query,
            const std::vector<std::string>& argv) {
  const json file = load_config(c);
  const std::string scene_file = !scene_path.empty() ? scene_path : file.value("scene", std::string());
  if (scene_file.empty()) throw Error(ErrorCode::InvalidConfig, "scene: pass --scene or set it in the config");
  const SceneSpec scene = load_scene(scene_file);
  const TaskQuery q = resolve_query(scene, !query.empty() ? query : file.value("query", std::string()));
  const PipelineConfig cfg = pipeline_config(c, file);
  const std::string spec = scorer_spec(c, file);
  const auto factory = make_factory(spec, cfg, c);

  const fs::path dir = make_run_dir(c, "run");
  EpisodeOutput out;
  {
    std::ofstream decisions(dir / "decisions.jsonl", std::ios::binary);
    auto inner = factory(scene, cfg.seed);
    RecordingScorer scorer(*inner, decisions, cfg.seed);
    out = run_episode(scene, q, scorer, cfg);
  }
  out.result.trace_ref = "trace.jsonl";
  write_text(dir / "trace.jsonl", out.trace.to_jsonl());
  write_text(dir / "result.json", to_json(out.result).dump(2) + "\n");
  std::vector<std::string> files{"trace.jsonl", "decisions.jsonl", "result.json"};
  if (out.artifacts.candidates) {
    write_text(dir / "candidates.json", to_json(*out.artifacts.candidates).dump(2) + "\n");
    files.push_back("candidates.json");
  }
  if (out.artifacts.grid) {
    std::ofstream g(dir / "taskgrid.ppm", std::ios::binary);
    write_ppm(g, out.artifacts.grid->to_rgb());
    files.push_back("taskgrid.ppm");
  }
  ordered_json echo = to_json(cfg);
  echo["scene"] = scene_file;
  echo["query"] = q.text;
  echo["scorer"] = spec;
  write_manifest(dir, "run", argv, echo, files);

  const auto& r = out.result;
  std::printf("%s  mode=%s  success=%d  DTG=%.3f m  heading_error=%.1f deg  l=%.3f  p=%.3f%s%s\n", r.scene.c_str(),
              r.mode.c_str(), r.success ? 1 : 0, r.dtg, r.heading_error_deg, r.shortest_length, r.traveled,
              r.failure ? "  failure=" : "", r.failure.value_or("").c_str());
  std::printf("run directory: %s\n", dir.c_str());
  return r.success ? kExitOk : kExitFailed;
}

std::vector<SceneSpec> load_suite(const std::vector<std::string>& paths, const std::string& suite, int count,
                                  std::uint64_t suite_seed) {
  std::vector<SceneSpec> scenes;
  if (!suite.empty()) {
    if (suite == "reachable") return reachable_suite(count, suite_seed);
    if (suite == "side-back") return side_back_suite(count, suite_seed);
    if (suite == "ablation") return ablation_suite(count, suite_seed);
    throw Error(ErrorCode::InvalidConfig, "suite: expected reachable, side-back or ablation");
  }
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) scenes.push_back(load_scene(f));
    } else {
      scenes.push_back(load_scene(p));
    }
  }
  if (scenes.empty()) throw Error(ErrorCode::InvalidConfig, "scenes: pass --scene files/directories or --suite");
  return scenes;
}

struct BenchOptions {
  std::vector<std::string> scenes;
  std::string suite;
  int count = 10;
  std::uint64_t suite_seed = 1;
  int repeats = 1;
  std::string gates_path;
  std::optional<double> min_sr;
  std::optional<double> min_spl;
  std::optional<double> max_dtg;
};

int cmd_bench(const Common& c, const BenchOptions& b, bool ablate, const std::vector<std::string>& argv) {
  const json file = load_config(c);
  const auto scenes = load_suite(b.scenes, b.suite, b.count, b.suite_seed);
  BenchmarkConfig bc;
  bc.pipeline = pipeline_config(c, file);
  bc.repeats = b.repeats;
  bc.jobs = c.jobs;
  bc.modes = ablate ? std::vector<Mode>{Mode::Full, Mode::DNT, Mode::OGD, Mode::NoRTS}
                    : std::vector<Mode>{bc.pipeline.mode};
  const std::string spec = scorer_spec(c, file);
  const auto factory = make_factory(spec, bc.pipeline, c);

  Gates gates = file.contains("gates") ? gates_from_json(file["gates"]) : Gates{};
  if (!b.gates_path.empty()) gates = gates_from_json(json::parse(read_text(b.gates_path)));
  if (b.min_sr) gates.min_sr = b.min_sr;
  if (b.min_spl) gates.min_spl = b.min_spl;
  if (b.max_dtg) gates.max_mean_dtg = b.max_dtg;

  const fs::path dir = make_run_dir(c, ablate ? "ablate" : "bench");
  bc.trace_dir = dir / "traces";
  const auto report = run_benchmark(suite_from_scenes(scenes), factory, bc);
  write_text(dir / "report.csv", report_csv(report));
  ordered_json rj = report_json(report);
  rj["config"]["scorer"] = spec;
  write_text(dir / "report.json", rj.dump(2) + "\n");
  write_manifest(dir, ablate ? "ablate" : "bench", argv, rj["config"], {"report.csv", "report.json", "traces/"});

  std::printf("%-8s %8s %8s %8s %10s\n", "mode", "SR", "SPL", "DTG", "episodes");
  for (Mode m : bc.modes) {
    const auto rows = report.rows_for(std::string(to_string(m)));
    const auto a = aggregate(rows);
    std::printf("%-8s %8.3f %8.3f %8.3f %10zu\n", std::string(to_string(m)).c_str(), a.sr, a.spl, a.mean_dtg,
                a.episodes);
  }
  std::printf("run directory: %s\n", dir.c_str());

  int code = kExitOk;
  for (const auto& v : check_gates(report, gates)) {
    std::fprintf(stderr, "gate violated: %s\n", v.c_str());
    code = kExitFailed;
  }
  for (const auto& r : report.rows) {
    if (infrastructure_failure(r)) {
      std::fprintf(stderr, "episode %s/%s/%llu: %s\n", r.scene.c_str(), r.mode.c_str(),
                   static_cast<unsigned long long>(r.seed), r.failure->c_str());
      code = kExitFailed;
    }
  }
  return code;
}

int cmd_viz(const std::string& scene_path, const std::string& trace_path, const std::string& out) {
  const SceneSpec scene = load_scene(scene_path);
  std::optional<EpisodeTrace> trace;
  if (!trace_path.empty()) trace = EpisodeTrace::from_jsonl(read_text(trace_path));
  const auto res = viz::render(scene, trace ? &*trace : nullptr, out);
  for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
  if (trace) std::cout << "candidate circles: " << res.circles << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"navgaze: navigate-to-gaze planner and simulator"};
  app.require_subcommand(1);
  const std::vector<std::string> args(argv, argv + argc);

  std::string tmpl;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_suite;
  int gen_count = 10;
  auto* gen = app.add_subcommand("gen-scene", "write a synthetic scene (or a suite of scenes) as JSON");
  gen->add_option("--template", tmpl, "open-room | wall-backed-object | corner-object | enclosed-object | cluttered");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file (stdout when omitted); a directory with --suite");
  gen->add_option("--suite", gen_suite, "reachable | side-back | ablation");
  gen->add_option("--count", gen_count, "scenes in the suite")->check(CLI::PositiveNumber);

  Common run_opts;
  std::string run_scene;
  std::string run_query;
  auto* run = app.add_subcommand("run", "run one episode");
  add_common(run, run_opts, true);
  run->add_option("--scene", run_scene, "scene JSON")->check(CLI::ExistingFile);
  run->add_option("--query", run_query, "task text or object label (default: the scene's first task)");

  Common bench_opts;
  BenchOptions bench_b;
  auto add_bench = [](CLI::App* cmd, Common& c, BenchOptions& b, bool with_mode) {
    add_common(cmd, c, with_mode);
    cmd->add_option("--scene", b.scenes, "scene files or directories");
    cmd->add_option("--suite", b.suite, "generated suite: reachable | side-back | ablation");
    cmd->add_option("--count", b.count, "scenes in the generated suite")->check(CLI::PositiveNumber);
    cmd->add_option("--suite-seed", b.suite_seed, "generator seed for --suite");
    cmd->add_option("--repeats", b.repeats, "episodes per scene with consecutive seeds")->check(CLI::PositiveNumber);
    cmd->add_option("--gates", b.gates_path, "JSON gates file")->check(CLI::ExistingFile);
    cmd->add_option_function<double>("--min-sr", [&b](double v) { b.min_sr = v; }, "gate: fail when SR is below this");
    cmd->add_option_function<double>("--min-spl", [&b](double v) { b.min_spl = v; }, "gate: fail when SPL is below this");
    cmd->add_option_function<double>("--max-dtg", [&b](double v) { b.max_dtg = v; }, "gate: fail when mean DTG exceeds this");
  };
  auto* bench = app.add_subcommand("bench", "run a benchmark suite in one mode");
  add_bench(bench, bench_opts, bench_b, true);

  Common abl_opts;
  BenchOptions abl_b;
  auto* ablate = app.add_subcommand("ablate", "run full, dnt, ogd and norts on one suite");
  add_bench(ablate, abl_opts, abl_b, false);

  std::string viz_scene;
  std::string viz_trace;
  std::string viz_out = "viz";
  auto* vizc = app.add_subcommand("viz", "render a scene and optionally an episode trace");
  vizc->add_option("--scene", viz_scene, "scene JSON")->required()->check(CLI::ExistingFile);
  vizc->add_option("--trace", viz_trace, "episode trace (JSON lines)")->check(CLI::ExistingFile);
  vizc->add_option("--out", viz_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      if (tmpl.empty() && gen_suite.empty()) throw Error(ErrorCode::InvalidConfig, "template: pass --template or --suite");
      return cmd_gen_scene(tmpl, gen_seed, gen_out, gen_suite, gen_count);
    }
    if (*run) return cmd_run(run_opts, run_scene, run_query, args);
    if (*bench) return cmd_bench(bench_opts, bench_b, false, args);
    if (*ablate) return cmd_bench(abl_opts, abl_b, true, args);
    if (*vizc) return cmd_viz(viz_scene, viz_trace, viz_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::UnknownTemplate ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailed;
  }
  return kExitUsage;
}
