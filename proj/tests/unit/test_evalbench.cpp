#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "navgaze/errors.hpp"
#include "navgaze/evalbench.hpp"
#include "navgaze/metrics.hpp"
#include "navgaze/scene_gen.hpp"

using namespace navgaze;

namespace {

EpisodeResult row(bool s, double l, double p, double dtg = 0.0) {
  EpisodeResult r;
  r.success = s;
  r.shortest_length = l;
  r.traveled = p;
  r.dtg = dtg;
  return r;
}

}  // namespace

TEST_CASE("distance to goal") {
  CHECK(compute_dtg(Vec2(1, 0), Vec2(1, 0.4)) == doctest::Approx(0.4));
  CHECK(compute_dtg(Vec2(1, 0), Vec2(1, 0.4)) < 0.5);
  CHECK(compute_dtg(Pose2{Vec2(2, 3), 10}, Pose2{Vec2(2, 3), 190}) == 0.0);
  CHECK(compute_dtg(Vec2(-1, -1), Vec2(2, 3)) == 5.0);
}

TEST_CASE("success weighted by path length") {
  const std::vector<EpisodeResult> one{row(true, 2, 4)};
  CHECK(compute_spl(one) == 0.5);
  const std::vector<EpisodeResult> fails{row(false, 2, 1), row(false, 3, 3)};
  CHECK(compute_spl(fails) == 0.0);
  CHECK(compute_sr(fails) == 0.0);
  const std::vector<EpisodeResult> two{row(true, 3, 3), row(true, 1, 2)};
  CHECK(compute_spl(two) == 0.75);
  const std::vector<EpisodeResult> zero{row(true, 0, 0)};
  CHECK(compute_spl(zero) == 1.0);
  CHECK_THROWS_AS(compute_spl(std::vector<EpisodeResult>{}), Error);
}

TEST_CASE("success rate") {
  std::vector<EpisodeResult> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(row(i < 7, 1, 1));
  CHECK(compute_sr(ten) == 0.7);
  CHECK(compute_sr(std::vector<EpisodeResult>{row(true, 1, 1)}) == 1.0);
  CHECK_THROWS_AS(compute_sr(std::vector<EpisodeResult>{}), Error);
  CHECK_THROWS_AS(mean_dtg(std::vector<EpisodeResult>{}), Error);
}

TEST_CASE("spl never exceeds sr") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 5);
  for (int t = 0; t < 200; ++t) {
    std::vector<EpisodeResult> rs;
    bool all_short = true;
    for (int i = 0; i < 1 + t % 9; ++i) {
      rs.push_back(row(rng() % 3 != 0, u(rng), u(rng)));
      if (rs.back().success && rs.back().traveled > rs.back().shortest_length) all_short = false;
    }
    const double spl = compute_spl(rs);
    const double sr = compute_sr(rs);
    CHECK(spl >= 0.0);
    CHECK(spl <= sr + 1e-15);
    CHECK(sr <= 1.0);
    if (all_short) CHECK(spl == doctest::Approx(sr));
    else CHECK(spl < sr);
  }
}

TEST_CASE("benchmark rows and aggregates") {
  const auto scenes = reachable_suite(3, 2);
  BenchmarkConfig cfg;
  cfg.repeats = 2;
  cfg.modes = {Mode::Full, Mode::DNT};
  const auto rep = run_benchmark(suite_from_scenes(scenes), oracle_factory(), cfg);
  CHECK(rep.rows.size() == 3 * 2 * 2);
  CHECK(rep.rows[0].scene == scenes[0].name);
  CHECK(rep.rows[0].mode == "full");
  CHECK(rep.rows[0].seed == 0);
  CHECK(rep.rows[1].seed == 1);
  CHECK(rep.rows[2].mode == "dnt");

  const auto full = rep.rows_for("full");
  const auto agg = aggregate(full);
  CHECK(agg.episodes == 6);
  double s = 0;
  for (const auto& r : full) s += r.success ? 1 : 0;
  CHECK(agg.sr == s / 6);
  CHECK(agg.sr == compute_sr(full));
  CHECK(agg.spl == compute_spl(full));
  CHECK(agg.mean_dtg == mean_dtg(full));
  CHECK(agg.spl <= agg.sr);

  const auto per = rep.per_scene();
  CHECK(per.at("full").size() == 3);
  CHECK(per.at("full").at(scenes[0].name).episodes == 2);

  const std::string csv = report_csv(rep);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("scene,query,mode,seed,success,shortest_length,traveled,dtg", 0) == 0);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 12);

  const auto j = report_json(rep);
  CHECK(j.contains("config"));
  CHECK(j["modes"]["full"]["sr"] == agg.sr);

  BenchmarkConfig par = cfg;
  par.jobs = 3;
  CHECK(report_csv(run_benchmark(suite_from_scenes(scenes), oracle_factory(), par)) == csv);
}

TEST_CASE("gates") {
  BenchmarkReport rep;
  rep.rows = {row(true, 1, 2, 0.1), row(false, 1, 1, 1.0)};
  for (auto& r : rep.rows) r.mode = "full";
  rep.rows[1].failure = "Transport";
  Gates g = gates_from_json(nlohmann::json::parse(R"({"min_sr":0.6,"max_mean_dtg":0.5})"));
  CHECK(check_gates(rep, g).size() == 2);
  g = gates_from_json(nlohmann::json::parse(R"({"min_sr":0.5,"min_spl":0.25})"));
  CHECK(check_gates(rep, g).empty());
  g.fail_on_episode_error = true;
  CHECK(check_gates(rep, g).size() == 1);
  CHECK_THROWS_AS(gates_from_json(nlohmann::json::parse(R"({"min_sr":"high"})")), Error);
}

TEST_CASE("traces are written per episode") {
  const auto dir = std::filesystem::temp_directory_path() / "navgaze_bench_traces";
  std::filesystem::remove_all(dir);
  BenchmarkConfig cfg;
  cfg.trace_dir = dir;
  const auto rep = run_benchmark(suite_from_scenes(reachable_suite(2, 5)), oracle_factory(), cfg);
  for (const auto& r : rep.rows) {
    CHECK_FALSE(r.trace_ref.empty());
    CHECK(std::filesystem::exists(dir / r.trace_ref));
  }
  std::filesystem::remove_all(dir);
}
