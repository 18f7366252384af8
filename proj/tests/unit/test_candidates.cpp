#include <doctest.h>

#include <random>

#include "navgaze/candidates.hpp"
#include "navgaze/errors.hpp"
#include "oracles.hpp"

using namespace navgaze;

TEST_CASE("lattice seeding") {
  TaskGrid g(Vec2(0, 0), 1.5, 0.01);
  const auto s = seed_centers(g, 0.2);
  CHECK(s.size() == 46 * 46);
  CHECK((s[1] - s[0]).norm() == doctest::Approx(0.2 / 3));
  for (const auto& p : s) {
    CHECK(p.x() >= g.origin().x());
    CHECK(p.y() >= g.origin().y());
    CHECK(p.x() <= g.max_corner().x());
    CHECK(p.y() <= g.max_corner().y());
  }

  TaskGrid tiny(Vec2(0, 0), 0.02, 0.01);
  const auto t = seed_centers(tiny, 0.2);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == tiny.origin());
  CHECK(t[3] == tiny.max_corner());
}

TEST_CASE("distance band") {
  const SpatialIndex2D obj({Vec2(0, 0)});
  const std::vector<Vec2> c{Vec2(0.1, 0), Vec2(0.05, 0), Vec2(0.35, 0), Vec2(0.3, 0)};
  const auto kept = filter_by_band(c, obj, 0.2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == Vec2(0.1, 0));
  CHECK(kept[1] == Vec2(0.3, 0));
  CHECK(filter_by_band(std::vector<Vec2>{Vec2(5, 5)}, obj, 0.2).empty());
  CHECK_THROWS_AS(filter_by_band(c, SpatialIndex2D{}, 0.2), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec2> objs, cents;
  for (int i = 0; i < 50; ++i) objs.emplace_back(u(rng) * 0.3, u(rng) * 0.3);
  for (int i = 0; i < 2000; ++i) cents.emplace_back(u(rng), u(rng));
  const SpatialIndex2D idx(objs);
  std::vector<Vec2> brute;
  for (const auto& p : cents) {
    const double d = oracle::min_distance(objs, p);
    if (d >= 0.1 && d <= 0.3) brute.push_back(p);
  }
  CHECK(filter_by_band(cents, idx, 0.2, Exec::Serial) == brute);
  CHECK(filter_by_band(cents, idx, 0.2, Exec::Parallel) == brute);
}

TEST_CASE("repositioning") {
  const SpatialIndex2D obs({Vec2(0, 0)});
  const Eigen::AlignedBox2d bounds(Vec2(-2, -2), Vec2(2, 2));
  const auto moved = reposition(std::vector<Vec2>{Vec2(0.15, 0)}, obs, 0.2, 0.01, bounds);
  REQUIRE(moved.size() == 1);
  CHECK(moved[0].norm() > 0.2);
  CHECK(moved[0].norm() <= 0.21);
  CHECK(std::abs(moved[0].y()) < 1e-12);

  const auto kept = reposition(std::vector<Vec2>{Vec2(0.5, 0)}, obs, 0.2, 0.01, bounds);
  CHECK(kept == std::vector<Vec2>{Vec2(0.5, 0)});

  // Concave pocket: obstacle points on a tight U around the centre.
  std::vector<Vec2> pocket;
  for (int i = 0; i <= 60; ++i) {
    const double y = -0.3 + i * 0.01;
    pocket.emplace_back(-0.12, y);
    pocket.emplace_back(0.12, y);
  }
  for (int i = 0; i <= 24; ++i) pocket.emplace_back(-0.12 + i * 0.01, -0.3);
  const SpatialIndex2D pidx(pocket);
  const Eigen::AlignedBox2d tight(Vec2(-0.3, -0.35), Vec2(0.3, 0.35));
  const Vec2 start(0.0, 0.0);
  CHECK(reposition(std::vector<Vec2>{start}, pidx, 0.2, 0.01, tight).empty());
  // Dense sampling along every ray from the centre finds no legal placement.
  int legal = 0;
  for (int a = 0; a < 360; ++a) {
    const Vec2 dir(std::cos(deg2rad(a)), std::sin(deg2rad(a)));
    for (double s = 0; s < 0.5; s += 0.002) {
      const Vec2 p = start + s * dir;
      if (!tight.contains(p)) break;
      if (oracle::min_distance(pocket, p) > 0.2) ++legal;
    }
  }
  CHECK(legal == 0);
}

TEST_CASE("greedy non-overlap") {
  const std::vector<Vec2> c{Vec2(0, 0), Vec2(0.1, 0), Vec2(1, 0)};
  // Find a seed whose first pick is (0,0).
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto s = select_non_overlapping(c, 0.2, seed);
    if (s.circles.front().center != Vec2(0, 0)) continue;
    REQUIRE(s.size() == 2);
    CHECK(s.circles[1].center == Vec2(1, 0));
    CHECK(s.circles[0].marker == 1);
    CHECK(s.circles[1].marker == 2);
    break;
  }
  const auto one = select_non_overlapping(std::vector<Vec2>{Vec2(2, 2)}, 0.2, 0);
  REQUIRE(one.size() == 1);
  CHECK(one.circles[0].marker == 1);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 400; ++i) pts.emplace_back(u(rng), u(rng));
    const auto s = select_non_overlapping(pts, 0.2, seed);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) CHECK((s.circles[i].center - s.circles[j].center).norm() >= 0.4);
    // Maximality: every dropped centre conflicts with some retained one.
    for (const auto& p : pts) {
      double best = 1e300;
      for (const auto& k : s.circles) best = std::min(best, (k.center - p).norm());
      CHECK(best < 0.4);
    }
  }
}

TEST_CASE("isolated disk object") {
  TaskGrid g(Vec2(0, 0), 1.3, 0.01);
  std::vector<Vec2> obj, ground;
  for (int r = 0; r < g.size(); ++r)
    for (int c = 0; c < g.size(); ++c) {
      const Vec2 p = g.cell_center({c, r});
      (p.norm() <= 0.3 ? obj : ground).push_back(p);
    }
  g.rasterize(ground, CellState::Ground);
  g.rasterize(obj, CellState::QueriedObject);
  const auto set = generate_candidates(g, {});
  CHECK(set.size() >= 4);
  CHECK(oracle::verify_candidates(g, set, 0.2, 0.01).total() == 0);
  CHECK(generate_candidates(g, {}).circles.size() == set.size());
}

TEST_CASE("object against a wall") {
  TaskGrid g(Vec2(0, 0), 1.3, 0.01);
  std::vector<Vec2> obj, wall, ground;
  for (int r = 0; r < g.size(); ++r)
    for (int c = 0; c < g.size(); ++c) {
      const Vec2 p = g.cell_center({c, r});
      if (p.y() >= 0.3) wall.push_back(p);
      else if (std::abs(p.x()) <= 0.35 && p.y() >= -0.3) obj.push_back(p);
      else ground.push_back(p);
    }
  g.rasterize(ground, CellState::Ground);
  g.rasterize(wall, CellState::Obstacle);
  g.rasterize(obj, CellState::QueriedObject);
  const auto set = generate_candidates(g, {});
  REQUIRE_FALSE(set.empty());
  CHECK(oracle::verify_candidates(g, set, 0.2, 0.01).total() == 0);
  for (const auto& c : set.circles) CHECK(c.center.y() < 0.3 - 0.2);
}

TEST_CASE("enclosed object has no candidate") {
  TaskGrid g(Vec2(0, 0), 1.3, 0.01);
  std::vector<Vec2> obj, ring, ground;
  for (int r = 0; r < g.size(); ++r)
    for (int c = 0; c < g.size(); ++c) {
      const Vec2 p = g.cell_center({c, r});
      if (p.norm() <= 0.15) obj.push_back(p);
      else if (std::abs(p.norm() - 0.4) < 0.02) ring.push_back(p);
      else ground.push_back(p);
    }
  g.rasterize(ground, CellState::Ground);
  g.rasterize(ring, CellState::Obstacle);
  g.rasterize(obj, CellState::QueriedObject);
  try {
    generate_candidates(g, {});
    FAIL("expected NoFeasibleCandidate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoFeasibleCandidate);
  }

  TaskGrid empty(Vec2(0, 0), 1.0, 0.01);
  CHECK_THROWS_AS(generate_candidates(empty, {}), Error);
}

TEST_CASE("random layouts pass re-verification") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto g = oracle::random_layout(seed);
    CandidateOptions o;
    o.seed = seed;
    try {
      const auto set = generate_candidates(g, o);
      CHECK(oracle::verify_candidates(g, set, 0.2, 0.01).total() == 0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoFeasibleCandidate);
    }
  }
}

TEST_CASE("candidate set json round trip") {
  CandidateSet s;
  s.seed = 42;
  s.circles.push_back({Vec2(0.5, -1.25), 0.2, 1, 0.75});
  s.circles.push_back({Vec2(1, 2), 0.2, 2, std::nullopt});
  const auto r = candidate_set_from_json(nlohmann::json::parse(to_json(s).dump()));
  REQUIRE(r.size() == 2);
  CHECK(r.seed == 42);
  CHECK(r.circles[0].center == s.circles[0].center);
  CHECK(r.circles[0].score == 0.75);
  CHECK_FALSE(r.circles[1].score);
  CHECK(r.find(2) != nullptr);
  CHECK(r.find(3) == nullptr);
}
