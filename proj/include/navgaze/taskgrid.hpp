#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "navgaze/geometry.hpp"
#include "navgaze/image_io.hpp"

namespace navgaze {

/// Minimal enclosing circle of the object's ground projection.
struct ObjectFootprint {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Minimal enclosing circle of `points`; the radius is floored at `min_radius`
/// so a single-point object still has a usable footprint.
/// Throws Error(EmptyObject) for an empty input.
ObjectFootprint object_footprint(std::span<const Vec2> points, double min_radius = 0.0);

/// Enumerators are declared in priority order so that a larger value wins
/// during rasterization: QueriedObject > Obstacle > Ground > Unseen.
enum class CellState : std::uint8_t { Unseen = 0, Ground = 1, Obstacle = 2, QueriedObject = 3 };

/// The conventional cell code: -1 (empty), 0 (obstacle), 1 (ground), 2 (object).
int cell_code(CellState s);

struct CellIndex {
  int col = 0;
  int row = 0;
  bool operator==(const CellIndex&) const = default;
};

/// Square grid centred on the object. Cell (col, row) spans
/// [origin + col·res, origin + (col+1)·res) on x and likewise on y; points on a
/// boundary belong to the higher-index cell's lower edge (floor convention).
class TaskGrid {
 public:
  TaskGrid(const Vec2& center, double half_extent, double resolution);

  [[nodiscard]] const Vec2& center() const noexcept { return center_; }
  [[nodiscard]] double half_extent() const noexcept { return half_extent_; }
  [[nodiscard]] double resolution() const noexcept { return resolution_; }
  [[nodiscard]] int size() const noexcept { return n_; }
  [[nodiscard]] std::size_t cell_count() const noexcept { return cells_.size(); }
  [[nodiscard]] Vec2 origin() const { return center_ - Vec2::Constant(n_ * resolution_ * 0.5); }
  [[nodiscard]] Vec2 max_corner() const { return center_ + Vec2::Constant(n_ * resolution_ * 0.5); }

  [[nodiscard]] std::optional<CellIndex> cell_of(const Vec2& p) const;
  [[nodiscard]] Vec2 cell_center(CellIndex c) const;
  [[nodiscard]] CellState at(CellIndex c) const { return cells_[offset(c)]; }
  [[nodiscard]] CellState state_at(const Vec2& p) const;  // Unseen outside the grid
  [[nodiscard]] bool contains(const Vec2& p) const { return cell_of(p).has_value(); }

  /// Each point inside the grid raises its cell to max(current, state).
  /// Throws Error(Precondition) for state == Unseen.
  void rasterize(std::span<const Vec2> points, CellState state);

  /// Cell centres in row-major order (row = y index, then col = x index).
  [[nodiscard]] std::vector<Vec2> cells_of_state(CellState state) const;
  [[nodiscard]] std::size_t count(CellState state) const;

  [[nodiscard]] const std::vector<CellState>& cells() const noexcept { return cells_; }
  bool operator==(const TaskGrid& other) const;

  /// North-up renderings: PGM with gray/black/white/dark-gray and a PPM with the object in red.
  [[nodiscard]] GrayImage to_gray() const;
  [[nodiscard]] RgbImage to_rgb() const;

 private:
  [[nodiscard]] std::size_t offset(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * n_ + c.col;
  }

  Vec2 center_;
  double half_extent_;
  double resolution_;
  int n_;
  std::vector<CellState> cells_;
};

/// Grid centred at the footprint with half-extent r_q + margin (default 1 m).
TaskGrid build_task_grid(const ObjectFootprint& footprint, double resolution, double margin = 1.0);

/// Value-returning form of TaskGrid::rasterize.
TaskGrid rasterize(TaskGrid grid, std::span<const Vec2> points, CellState state);

}  // namespace navgaze
