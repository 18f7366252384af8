#include "navgaze/spatial_index.hpp"

#include <algorithm>
#include <limits>

#include "navgaze/errors.hpp"

namespace navgaze {

namespace {

constexpr int kMaxDepth = 24;

double box_sq_distance(const Eigen::AlignedBox2d& box, const Vec2& q) {
  double dx = 0.0;
  if (q.x() < box.min().x()) dx = box.min().x() - q.x();
  else if (q.x() > box.max().x()) dx = q.x() - box.max().x();
  double dy = 0.0;
  if (q.y() < box.min().y()) dy = box.min().y() - q.y();
  else if (q.y() > box.max().y()) dy = q.y() - box.max().y();
  return dx * dx + dy * dy;
}

// Distance as (p - q).squaredNorm() would compute it; kept in one place so the
// tree and the linear scan agree bit for bit.
inline double sq_dist(const Vec2& p, const Vec2& q) {
  const double dx = p.x() - q.x();
  const double dy = p.y() - q.y();
  return dx * dx + dy * dy;
}

inline bool better(double d2, std::size_t idx, double best_d2, std::size_t best_idx) {
  return d2 < best_d2 || (d2 == best_d2 && idx < best_idx);
}

}  // namespace

SpatialIndex2D::SpatialIndex2D(std::vector<Vec2> points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
  if (points_.empty()) return;
  order_.resize(points_.size());
  Eigen::AlignedBox2d box;
  for (std::uint32_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
    box.extend(points_[i]);
  }
  nodes_.reserve(2 * points_.size() / leaf_size_ + 8);
  nodes_.push_back(Node{box, -1, 0, static_cast<std::uint32_t>(order_.size())});
  split(0, 0);
}

void SpatialIndex2D::split(std::int32_t id, int depth) {
  const std::uint32_t begin = nodes_[id].begin;
  const std::uint32_t end = nodes_[id].end;
  if (end - begin <= leaf_size_ || depth >= kMaxDepth) return;

  const Eigen::AlignedBox2d box = nodes_[id].box;
  const Vec2 mid = box.center();
  auto first = order_.begin() + begin;
  auto last = order_.begin() + end;
  auto split_y = std::partition(first, last, [&](std::uint32_t i) { return points_[i].y() < mid.y(); });
  auto split_lo = std::partition(first, split_y, [&](std::uint32_t i) { return points_[i].x() < mid.x(); });
  auto split_hi = std::partition(split_y, last, [&](std::uint32_t i) { return points_[i].x() < mid.x(); });

  const std::uint32_t b[5] = {begin, static_cast<std::uint32_t>(split_lo - order_.begin()),
                              static_cast<std::uint32_t>(split_y - order_.begin()),
                              static_cast<std::uint32_t>(split_hi - order_.begin()), end};
  // Quadrants: (lo x, lo y), (hi x, lo y), (lo x, hi y), (hi x, hi y).
  const Eigen::AlignedBox2d quads[4] = {
      {box.min(), mid},
      {Vec2(mid.x(), box.min().y()), Vec2(box.max().x(), mid.y())},
      {Vec2(box.min().x(), mid.y()), Vec2(mid.x(), box.max().y())},
      {mid, box.max()},
  };

  const auto first_child = static_cast<std::int32_t>(nodes_.size());
  nodes_[id].first_child = first_child;
  for (int c = 0; c < 4; ++c) nodes_.push_back(Node{quads[c], -1, b[c], b[c + 1]});
  for (int c = 0; c < 4; ++c) split(first_child + c, depth + 1);
}

SpatialIndex2D::Hit SpatialIndex2D::nearest(const Vec2& query) const {
  if (points_.empty()) throw Error(ErrorCode::EmptyIndex, "nearest() on an empty index");

  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_idx = std::numeric_limits<std::size_t>::max();

  std::vector<std::int32_t> stack;
  stack.reserve(64);
  stack.push_back(0);
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (box_sq_distance(node.box, query) > best_d2) continue;
    if (node.first_child < 0) {
      for (auto k = node.begin; k < node.end; ++k) {
        const std::uint32_t i = order_[k];
        const double d2 = sq_dist(points_[i], query);
        if (better(d2, i, best_d2, best_idx)) {
          best_d2 = d2;
          best_idx = i;
        }
      }
      continue;
    }
    // Push far children first so the nearest one is expanded next.
    std::pair<double, std::int32_t> kids[4];
    for (int c = 0; c < 4; ++c) {
      const auto cid = node.first_child + c;
      kids[c] = {box_sq_distance(nodes_[cid].box, query), cid};
    }
    std::sort(std::begin(kids), std::end(kids),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [d2, cid] : kids) {
      if (nodes_[cid].end > nodes_[cid].begin && d2 <= best_d2) stack.push_back(cid);
    }
  }
  return Hit{std::sqrt(best_d2), points_[best_idx], best_idx};
}

SpatialIndex2D::Hit SpatialIndex2D::nearest_linear(const Vec2& query) const {
  if (points_.empty()) throw Error(ErrorCode::EmptyIndex, "nearest() on an empty index");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d2 = sq_dist(points_[i], query);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_idx = i;
    }
  }
  return Hit{std::sqrt(best_d2), points_[best_idx], best_idx};
}

}  // namespace navgaze
