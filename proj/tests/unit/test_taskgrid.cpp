#include <doctest.h>

#include <random>
#include <set>

#include "navgaze/errors.hpp"
#include "navgaze/taskgrid.hpp"

using namespace navgaze;

TEST_CASE("minimal enclosing circle") {
  const std::vector<Vec2> two{Vec2(0, 0), Vec2(2, 0)};
  const auto f = object_footprint(two);
  CHECK((f.center - Vec2(1, 0)).norm() < 1e-12);
  CHECK(f.radius == doctest::Approx(1.0));

  const std::vector<Vec2> one{Vec2(3, 3)};
  const auto s = object_footprint(one, 0.01);
  CHECK(s.center == Vec2(3, 3));
  CHECK(s.radius == 0.01);

  CHECK_THROWS_AS(object_footprint(std::vector<Vec2>{}), Error);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 500; ++i) pts.emplace_back(n(rng), 0.5 * n(rng));
    const auto c = object_footprint(pts);
    int outside_shrunk = 0;
    for (const auto& p : pts) {
      CHECK((p - c.center).norm() <= c.radius + 1e-6);
      if ((p - c.center).norm() > c.radius - 1e-6) ++outside_shrunk;
    }
    CHECK(outside_shrunk >= 1);
  }
}

TEST_CASE("task grid geometry") {
  const auto g = build_task_grid({Vec2(0.3, -0.2), 0.5}, 0.01);
  CHECK(g.size() == 300);
  CHECK(g.count(CellState::Unseen) == 90000);
  const auto c = g.cell_of(g.center());
  REQUIRE(c);
  CHECK(std::abs(c->col - 150) <= 1);
  CHECK(std::abs(c->row - 150) <= 1);

  const auto small = build_task_grid({Vec2(0, 0), 0.0}, 0.01);
  CHECK(small.size() == 202);
  CHECK(small.count(CellState::Unseen) == small.cell_count());

  // Boundary points go to the higher-index cell.
  TaskGrid t(Vec2(0.5, 0.5), 0.5, 0.25);
  CHECK(t.cell_of(Vec2(0.25, 0.5))->col == 1);
  CHECK(t.cell_of(Vec2(0.0, 0.0))->col == 0);
  CHECK_FALSE(t.cell_of(Vec2(1.0, 0.5)));
  CHECK_FALSE(t.cell_of(Vec2(-1e-9, 0.5)));
}

TEST_CASE("priority rasterization") {
  TaskGrid g(Vec2(0, 0), 0.5, 0.1);
  const std::vector<Vec2> p{Vec2(0.05, 0.05)};
  g.rasterize(p, CellState::Ground);
  CHECK(g.state_at(p[0]) == CellState::Ground);
  g.rasterize(p, CellState::Obstacle);
  g.rasterize(p, CellState::QueriedObject);
  CHECK(g.state_at(p[0]) == CellState::QueriedObject);
  g.rasterize(p, CellState::Ground);
  CHECK(g.state_at(p[0]) == CellState::QueriedObject);
  CHECK_THROWS_AS(g.rasterize(p, CellState::Unseen), Error);

  const auto once = rasterize(TaskGrid(Vec2(0, 0), 0.5, 0.1), p, CellState::Obstacle);
  CHECK(rasterize(once, p, CellState::Obstacle) == once);
}

TEST_CASE("cells_of_state counts") {
  TaskGrid g(Vec2(0, 0), 1.0, 0.05);
  CHECK(g.cells_of_state(CellState::Unseen).size() == g.cell_count());
  CHECK(g.cells_of_state(CellState::Obstacle).empty());

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::vector<Vec2> pts;
  std::set<std::pair<int, int>> distinct;
  for (int i = 0; i < 300; ++i) {
    pts.emplace_back(u(rng), u(rng));
    if (auto c = g.cell_of(pts.back())) distinct.insert({c->col, c->row});
  }
  g.rasterize(pts, CellState::QueriedObject);
  const auto centers = g.cells_of_state(CellState::QueriedObject);
  CHECK(centers.size() == distinct.size());
  for (const auto& c : centers) CHECK(g.state_at(c) == CellState::QueriedObject);
}

TEST_CASE("cell codes and renderings") {
  CHECK(cell_code(CellState::Unseen) == -1);
  CHECK(cell_code(CellState::Obstacle) == 0);
  CHECK(cell_code(CellState::Ground) == 1);
  CHECK(cell_code(CellState::QueriedObject) == 2);

  TaskGrid g(Vec2(0, 0), 0.2, 0.1);
  const std::vector<Vec2> p{Vec2(-0.15, -0.15)};
  g.rasterize(p, CellState::QueriedObject);
  const auto rgb = g.to_rgb();
  CHECK(rgb.get(0, 3) == Rgb{220, 0, 0});  // bottom-left cell, north-up image
  CHECK(rgb.get(3, 0) == Rgb{128, 128, 128});
  CHECK(g.to_gray().at(0, 3) == 64);
}
