#include "navgaze/taskgrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "navgaze/errors.hpp"

namespace navgaze {

namespace {

struct Circle {
  Vec2 c;
  double r;
};

constexpr double kContainEps = 1e-10;

bool inside(const Circle& circle, const Vec2& p) {
  return (p - circle.c).norm() <= circle.r + kContainEps * (1.0 + circle.r);
}

Circle from_two(const Vec2& a, const Vec2& b) {
  return {(a + b) * 0.5, (a - b).norm() * 0.5};
}

Circle from_three(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const double det = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  if (std::abs(det) < 1e-14 * (ab.squaredNorm() + ac.squaredNorm() + 1e-300)) {
    // Collinear: the farthest pair spans the circle.
    Circle best = from_two(a, b);
    for (const Circle& cand : {from_two(a, c), from_two(b, c)}) {
      if (cand.r > best.r) best = cand;
    }
    return best;
  }
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  const Vec2 rel((ac.y() * ab2 - ab.y() * ac2) / det, (ab.x() * ac2 - ac.x() * ab2) / det);
  return {a + rel, rel.norm()};
}

}  // namespace

ObjectFootprint object_footprint(std::span<const Vec2> points, double min_radius) {
  if (points.empty()) throw Error(ErrorCode::EmptyObject, "object has no projected points");

  std::vector<Vec2> pts(points.begin(), points.end());
  std::mt19937_64 rng(0x6e617669u);
  std::shuffle(pts.begin(), pts.end(), rng);

  Circle circle{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (inside(circle, pts[i])) continue;
    circle = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (inside(circle, pts[j])) continue;
      circle = from_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k) {
        if (!inside(circle, pts[k])) circle = from_three(pts[i], pts[j], pts[k]);
      }
    }
  }
  return {circle.c, std::max(circle.r, min_radius)};
}

int cell_code(CellState s) {
  switch (s) {
    case CellState::Unseen: return -1;
    case CellState::Obstacle: return 0;
    case CellState::Ground: return 1;
    case CellState::QueriedObject: return 2;
  }
  return -1;
}

TaskGrid::TaskGrid(const Vec2& center, double half_extent, double resolution)
    : center_(center), half_extent_(half_extent), resolution_(resolution) {
  if (!(resolution > 0.0) || !(half_extent > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "task grid needs positive resolution and extent");
  }
  n_ = std::max(1, static_cast<int>(std::lround(2.0 * half_extent / resolution)));
  cells_.assign(static_cast<std::size_t>(n_) * n_, CellState::Unseen);
}

std::optional<CellIndex> TaskGrid::cell_of(const Vec2& p) const {
  const Vec2 rel = (p - origin()) / resolution_;
  const double fx = std::floor(rel.x());
  const double fy = std::floor(rel.y());
  if (!(fx >= 0.0 && fy >= 0.0 && fx < n_ && fy < n_)) return std::nullopt;
  return CellIndex{static_cast<int>(fx), static_cast<int>(fy)};
}

Vec2 TaskGrid::cell_center(CellIndex c) const {
  return origin() + Vec2((c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_);
}

CellState TaskGrid::state_at(const Vec2& p) const {
  const auto c = cell_of(p);
  return c ? at(*c) : CellState::Unseen;
}

void TaskGrid::rasterize(std::span<const Vec2> points, CellState state) {
  if (state == CellState::Unseen) {
    throw Error(ErrorCode::Precondition, "cannot rasterize the Unseen state");
  }
  for (const auto& p : points) {
    const auto c = cell_of(p);
    if (!c) continue;
    auto& cell = cells_[offset(*c)];
    cell = std::max(cell, state);
  }
}

std::vector<Vec2> TaskGrid::cells_of_state(CellState state) const {
  std::vector<Vec2> out;
  for (int row = 0; row < n_; ++row) {
    for (int col = 0; col < n_; ++col) {
      if (cells_[offset({col, row})] == state) out.push_back(cell_center({col, row}));
    }
  }
  return out;
}

std::size_t TaskGrid::count(CellState state) const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), state));
}

bool TaskGrid::operator==(const TaskGrid& other) const {
  return n_ == other.n_ && resolution_ == other.resolution_ && center_ == other.center_ &&
         cells_ == other.cells_;
}

GrayImage TaskGrid::to_gray() const {
  GrayImage img(n_, n_);
  for (int row = 0; row < n_; ++row) {
    for (int col = 0; col < n_; ++col) {
      std::uint8_t v = 128;
      switch (at({col, row})) {
        case CellState::Unseen: v = 128; break;
        case CellState::Obstacle: v = 0; break;
        case CellState::Ground: v = 255; break;
        case CellState::QueriedObject: v = 64; break;
      }
      img.at(col, n_ - 1 - row) = v;
    }
  }
  return img;
}

RgbImage TaskGrid::to_rgb() const {
  RgbImage img(n_, n_);
  for (int row = 0; row < n_; ++row) {
    for (int col = 0; col < n_; ++col) {
      Rgb c{128, 128, 128};
      switch (at({col, row})) {
        case CellState::Unseen: break;
        case CellState::Obstacle: c = {0, 0, 0}; break;
        case CellState::Ground: c = {255, 255, 255}; break;
        case CellState::QueriedObject: c = {220, 0, 0}; break;
      }
      img.set(col, n_ - 1 - row, c);
    }
  }
  return img;
}

TaskGrid build_task_grid(const ObjectFootprint& footprint, double resolution, double margin) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidConfig, "resolution must be positive");
  const double r = std::max(footprint.radius, resolution);
  return TaskGrid(footprint.center, r + margin, resolution);
}

TaskGrid rasterize(TaskGrid grid, std::span<const Vec2> points, CellState state) {
  grid.rasterize(points, state);
  return grid;
}

}  // namespace navgaze
