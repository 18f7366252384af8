#include "navgaze/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "navgaze/errors.hpp"
#include "navgaze/kernels.hpp"

namespace navgaze {

const CandidateCircle* CandidateSet::find(int marker) const {
  for (const auto& c : circles) {
    if (c.marker == marker) return &c;
  }
  return nullptr;
}

std::vector<Vec2> seed_centers(const TaskGrid& grid, double robot_radius) {
  if (!(robot_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "robot radius must be positive");
  const double spacing = robot_radius / 3.0;
  const Vec2 lo = grid.origin();
  const Vec2 hi = grid.max_corner();
  const double edge = hi.x() - lo.x();
  const int per_axis = std::max(2, static_cast<int>(std::floor(edge / spacing + 1e-9)) + 1);
  std::vector<double> xs, ys;
  xs.reserve(per_axis);
  ys.reserve(per_axis);
  for (int i = 0; i < per_axis; ++i) {
    xs.push_back(std::min(lo.x() + i * spacing, hi.x()));
    ys.push_back(std::min(lo.y() + i * spacing, hi.y()));
  }
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (double y : ys) {
    for (double x : xs) out.emplace_back(x, y);
  }
  return out;
}

std::vector<Vec2> filter_by_band(std::span<const Vec2> centers, const SpatialIndex2D& object_index,
                                 double robot_radius, Exec exec) {
  if (object_index.empty()) throw Error(ErrorCode::EmptyObjectIndex, "no object points to measure against");
  const double lo = robot_radius * 0.5;
  const double hi = robot_radius * 1.5;
  const auto mask = exec == Exec::Parallel ? kernels::band_mask_omp(centers, object_index, lo, hi)
                                           : kernels::band_mask_serial(centers, object_index, lo, hi);
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (mask[i]) out.push_back(centers[i]);
  }
  return out;
}

std::vector<Vec2> reposition(std::span<const Vec2> centers, const SpatialIndex2D& obstacle_index,
                             double robot_radius, double epsilon, const Eigen::AlignedBox2d& bounds) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilon must be positive");
  if (obstacle_index.empty()) return {centers.begin(), centers.end()};

  // Clearance is 1-Lipschitz along the ray, so a jump of (r_r − d) can never
  // cross the first clear point, and the final fine step bounds the overshoot.
  const double fine = epsilon * 0.5;
  std::vector<Vec2> out;
  out.reserve(centers.size());
  for (const auto& c : centers) {
    const auto first = obstacle_index.nearest(c);
    if (first.distance > robot_radius) {
      out.push_back(c);
      continue;
    }
    if (first.distance < 1e-12) continue;
    const Vec2 dir = (c - first.point) / first.distance;
    double s = 0.0;
    double d = first.distance;
    for (;;) {
      s += std::max(fine, robot_radius - d);
      const Vec2 p = c + s * dir;
      if (!bounds.contains(p)) break;
      d = obstacle_index.nearest(p).distance;
      if (d > robot_radius) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

CandidateSet select_non_overlapping(std::span<const Vec2> centers, double robot_radius, std::uint64_t seed) {
  CandidateSet set;
  set.robot_radius = robot_radius;
  set.seed = seed;
  if (centers.empty()) return set;

  const double min_sep = 2.0 * robot_radius;
  std::vector<char> alive(centers.size(), 1);
  std::mt19937_64 rng(seed);
  std::size_t current = static_cast<std::size_t>(rng() % centers.size());
  int marker = 1;
  for (;;) {
    set.circles.push_back(CandidateCircle{centers[current], robot_radius, marker++, std::nullopt});
    alive[current] = 0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (alive[i] && (centers[i] - centers[current]).norm() < min_sep) alive[i] = 0;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t next = centers.size();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (!alive[i]) continue;
      const double d = (centers[i] - centers[current]).squaredNorm();
      if (d < best) {
        best = d;
        next = i;
      }
    }
    if (next == centers.size()) break;
    current = next;
  }
  return set;
}

bool disk_on_free_cells(const TaskGrid& grid, const Vec2& center, double radius) {
  const double res = grid.resolution();
  const Vec2 o = grid.origin();
  const int c0 = std::max(0, static_cast<int>(std::floor((center.x() - radius - o.x()) / res)));
  const int r0 = std::max(0, static_cast<int>(std::floor((center.y() - radius - o.y()) / res)));
  const int c1 = std::min(grid.size() - 1, static_cast<int>(std::floor((center.x() + radius - o.x()) / res)));
  const int r1 = std::min(grid.size() - 1, static_cast<int>(std::floor((center.y() + radius - o.y()) / res)));
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      if ((grid.cell_center({col, row}) - center).norm() > radius) continue;
      const CellState s = grid.at({col, row});
      if (s != CellState::Ground && s != CellState::Unseen) return false;
    }
  }
  return true;
}

bool ground_within(const TaskGrid& grid, const Vec2& center, double radius) {
  const double res = grid.resolution();
  const int reach = static_cast<int>(std::ceil(radius / res)) + 1;
  const auto c0 = grid.cell_of(center);
  if (!c0) return false;
  for (int row = c0->row - reach; row <= c0->row + reach; ++row) {
    for (int col = c0->col - reach; col <= c0->col + reach; ++col) {
      if (row < 0 || col < 0 || row >= grid.size() || col >= grid.size()) continue;
      const CellIndex ci{col, row};
      if (grid.at(ci) == CellState::Ground && (grid.cell_center(ci) - center).norm() <= radius) return true;
    }
  }
  return false;
}

CandidateSet generate_candidates(const TaskGrid& grid, const CandidateOptions& opts) {
  const double rr = opts.robot_radius;
  auto object_pts = grid.cells_of_state(CellState::QueriedObject);
  if (object_pts.empty()) throw Error(ErrorCode::NoQueriedObject, "task grid has no queried-object cells");
  auto obstacle_pts = grid.cells_of_state(CellState::Obstacle);
  obstacle_pts.insert(obstacle_pts.end(), object_pts.begin(), object_pts.end());

  const SpatialIndex2D object_index(std::move(object_pts));
  const SpatialIndex2D obstacle_index(std::move(obstacle_pts));
  const Eigen::AlignedBox2d bounds(grid.origin(), grid.max_corner());

  const auto seeds = seed_centers(grid, rr);
  const auto banded = filter_by_band(seeds, object_index, rr, opts.exec);
  const auto moved = reposition(banded, obstacle_index, rr, opts.epsilon, bounds);

  std::vector<Vec2> feasible;
  for (const auto& c : moved) {
    const double d_obj = object_index.nearest(c).distance;
    if (d_obj < rr * 0.5 || d_obj > rr * 1.5 + opts.epsilon) continue;
    if (obstacle_index.nearest(c).distance <= rr) continue;
    if (!ground_within(grid, c, opts.ground_support)) continue;
    if (!disk_on_free_cells(grid, c, rr)) continue;
    feasible.push_back(c);
  }

  CandidateSet set = select_non_overlapping(feasible, rr, opts.seed);
  set.epsilon = opts.epsilon;
  if (set.empty()) throw Error(ErrorCode::NoFeasibleCandidate, "no candidate region satisfies the constraints");
  return set;
}

nlohmann::ordered_json to_json(const CandidateSet& set) {
  nlohmann::ordered_json j;
  j["seed"] = set.seed;
  j["robot_radius"] = set.robot_radius;
  j["epsilon"] = set.epsilon;
  auto& arr = j["circles"] = nlohmann::ordered_json::array();
  for (const auto& c : set.circles) {
    nlohmann::ordered_json e;
    e["marker"] = c.marker;
    e["center"] = {c.center.x(), c.center.y()};
    e["radius"] = c.radius;
    e["score"] = c.score ? nlohmann::ordered_json(*c.score) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(e));
  }
  return j;
}

CandidateSet candidate_set_from_json(const nlohmann::json& j) {
  try {
    CandidateSet set;
    set.seed = j.at("seed").get<std::uint64_t>();
    set.robot_radius = j.at("robot_radius").get<double>();
    set.epsilon = j.value("epsilon", 0.01);
    for (const auto& e : j.at("circles")) {
      CandidateCircle c;
      c.marker = e.at("marker").get<int>();
      c.center = Vec2(e.at("center").at(0).get<double>(), e.at("center").at(1).get<double>());
      c.radius = e.value("radius", set.robot_radius);
      if (e.contains("score") && !e["score"].is_null()) c.score = e["score"].get<double>();
      set.circles.push_back(c);
    }
    return set;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::MalformedTrace, std::string("candidate set: ") + ex.what());
  }
}

}  // namespace navgaze
