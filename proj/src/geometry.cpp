#include "navgaze/geometry.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "navgaze/errors.hpp"
#include "navgaze/kernels.hpp"

namespace navgaze {

void PointCloud::append(const PointCloud& other) {
  if (has_labels() != other.has_labels() && !empty() && !other.empty()) {
    throw Error(ErrorCode::InvalidConfig, "cannot append labeled and unlabeled clouds");
  }
  points.insert(points.end(), other.points.begin(), other.points.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

void PointCloud::validate() const {
  if (has_labels() && labels.size() != points.size()) {
    throw Error(ErrorCode::InvalidConfig, "label count does not match point count");
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidConfig, "non-finite point");
  }
}

namespace {

void orient_up(PlaneModel& plane) {
  const Vec3& n = plane.normal;
  bool flip = false;
  if (std::abs(n.z()) > 1e-12) {
    flip = n.z() < 0.0;
  } else if (std::abs(n.y()) > 1e-12) {
    flip = n.y() < 0.0;
  } else {
    flip = n.x() < 0.0;
  }
  if (flip) {
    plane.normal = -plane.normal;
    plane.d = -plane.d;
  }
}

std::vector<std::size_t> collect_inliers(const std::vector<Vec3>& pts, const PlaneModel& plane,
                                         double tol) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (plane.distance(pts[i]) <= tol) out.push_back(i);
  }
  return out;
}

}  // namespace

PlaneModel fit_plane_least_squares(const std::vector<Vec3>& points) {
  if (points.size() < 3) throw Error(ErrorCode::DegenerateCloud, "need at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 r = p - centroid;
    scatter += r * r.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  PlaneModel plane;
  plane.normal = solver.eigenvectors().col(0).normalized();
  plane.d = -plane.normal.dot(centroid);
  orient_up(plane);
  return plane;
}

PlaneModel fit_ground_plane(const PointCloud& cloud, const RansacParams& params,
                            std::uint64_t seed, Exec exec) {
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  if (n < 3) throw Error(ErrorCode::DegenerateCloud, "fewer than 3 points");
  if (params.iterations <= 0 || params.inlier_tol <= 0.0) {
    throw Error(ErrorCode::InvalidConfig, "RANSAC needs positive iterations and tolerance");
  }

  const double min_up = params.max_tilt_deg ? std::cos(deg2rad(*params.max_tilt_deg)) : -1.0;
  std::mt19937_64 rng(seed);
  std::size_t best_count = 0;
  PlaneModel best;
  bool found = false;

  for (int it = 0; it < params.iterations; ++it) {
    const std::size_t i0 = rng() % n;
    std::size_t i1 = rng() % n;
    std::size_t i2 = rng() % n;
    if (i0 == i1 || i0 == i2 || i1 == i2) continue;

    const Vec3 cross = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]);
    const double len = cross.norm();
    if (len < 1e-12) continue;

    PlaneModel hyp;
    hyp.normal = cross / len;
    hyp.d = -hyp.normal.dot(pts[i0]);
    if (std::abs(hyp.normal.z()) < min_up) continue;
    const std::size_t count =
        exec == Exec::Parallel
            ? kernels::count_plane_inliers_omp(pts, hyp.normal, hyp.d, params.inlier_tol)
            : kernels::count_plane_inliers_serial(pts, hyp.normal, hyp.d, params.inlier_tol);
    if (!found || count > best_count) {
      best_count = count;
      best = hyp;
      found = true;
    }
  }
  if (!found) throw Error(ErrorCode::DegenerateCloud, "no admissible plane hypothesis");

  orient_up(best);
  best.inliers = collect_inliers(pts, best, params.inlier_tol);

  if (params.refit && best.inliers.size() >= 3) {
    std::vector<Vec3> subset;
    subset.reserve(best.inliers.size());
    for (auto i : best.inliers) subset.push_back(pts[i]);
    PlaneModel refit = fit_plane_least_squares(subset);
    refit.inliers = collect_inliers(pts, refit, params.inlier_tol);
    // A refit that loses support (e.g. from a near-collinear inlier set) is not kept.
    if (refit.inliers.size() >= best.inliers.size()) best = std::move(refit);
  }
  return best;
}

GroundFrame GroundFrame::from_plane(const PlaneModel& plane) {
  GroundFrame f;
  f.normal = plane.normal.normalized();
  f.origin = -plane.d * f.normal;
  Vec3 u = Vec3::UnitX() - Vec3::UnitX().dot(f.normal) * f.normal;
  if (u.norm() < 1e-6) u = Vec3::UnitY() - Vec3::UnitY().dot(f.normal) * f.normal;
  f.u = u.normalized();
  f.v = f.normal.cross(f.u);
  return f;
}

std::vector<Vec2> project_to_ground(const PointCloud& cloud, const PlaneModel& plane) {
  const GroundFrame frame = GroundFrame::from_plane(plane);
  std::vector<Vec2> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points) out.push_back(frame.project(p));
  return out;
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose3& pose) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(pose * p);
  out.labels = cloud.labels;
  return out;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    out << p.x() << ' ' << p.y() << ' ' << p.z();
    if (cloud.has_labels()) out << ' ' << static_cast<int>(cloud.labels[i]);
    out << '\n';
  }
  out.precision(old_precision);
}

PointCloud read_xyz(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  int columns = -1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(ErrorCode::InvalidConfig, "bad XYZ line " + std::to_string(lineno));
    }
    int label = -1;
    const bool has_label = static_cast<bool>(ss >> label);
    const int cols = has_label ? 4 : 3;
    if (columns < 0) columns = cols;
    if (cols != columns) {
      throw Error(ErrorCode::InvalidConfig, "mixed labeled/unlabeled XYZ at line " +
                                                std::to_string(lineno));
    }
    if (has_label) {
      if (label != 0 && label != 1) {
        throw Error(ErrorCode::InvalidConfig, "label must be 0 or 1 at line " +
                                                  std::to_string(lineno));
      }
      cloud.push_back({x, y, z}, static_cast<PointLabel>(label));
    } else {
      cloud.push_back({x, y, z});
    }
  }
  cloud.validate();
  return cloud;
}

double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  if (w >= 360.0) w -= 360.0;
  return w;
}

double signed_angle_deg(double from_deg, double to_deg) {
  double diff = wrap_degrees(to_deg - from_deg);
  if (diff > 180.0) diff -= 360.0;
  return diff;
}

}  // namespace navgaze
