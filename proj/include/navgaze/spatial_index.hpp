#pragma once

#include <cstdint>
#include <vector>

#include "navgaze/geometry.hpp"

namespace navgaze {

/// Static quadtree over 2D points. Queries are exact: they return the same
/// answer a linear scan would, including the tie-break on insertion order.
class SpatialIndex2D {
 public:
  struct Hit {
    double distance = 0.0;
    Vec2 point = Vec2::Zero();
    std::size_t index = 0;  // insertion order
  };

  SpatialIndex2D() = default;
  explicit SpatialIndex2D(std::vector<Vec2> points, std::size_t leaf_size = 16);

  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] const std::vector<Vec2>& points() const noexcept { return points_; }

  /// Throws Error(EmptyIndex) when the index holds no points.
  [[nodiscard]] Hit nearest(const Vec2& query) const;

  /// Exhaustive reference used by tests.
  [[nodiscard]] Hit nearest_linear(const Vec2& query) const;

 private:
  struct Node {
    Eigen::AlignedBox2d box;
    std::int32_t first_child = -1;  // four consecutive children, -1 for a leaf
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };

  void split(std::int32_t id, int depth);

  std::vector<Vec2> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::size_t leaf_size_ = 16;
};

}  // namespace navgaze
