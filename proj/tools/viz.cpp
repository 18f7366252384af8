#include "viz.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "navgaze/errors.hpp"

namespace navgaze::viz {

namespace {

using nlohmann::ordered_json;

constexpr double kPxPerMeter = 100.0;

struct Canvas {
  Eigen::AlignedBox2d box;
  std::ostringstream body;

  [[nodiscard]] double x(double wx) const { return (wx - box.min().x()) * kPxPerMeter; }
  [[nodiscard]] double y(double wy) const { return (box.max().y() - wy) * kPxPerMeter; }

  std::string finish() const {
    const Vec2 size = box.sizes() * kPxPerMeter;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size.x() << "\" height=\"" << size.y()
        << "\" viewBox=\"0 0 " << size.x() << " " << size.y() << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#f4f4f4\"/>\n"
        << body.str() << "</svg>\n";
    return out.str();
  }
};

void draw_primitives(Canvas& c, const SceneSpec& scene, const std::string& target_label) {
  for (const auto& p : scene.primitives) {
    const std::string fill = p.label == target_label ? "#d62728" : (p.label == "wall" ? "#555555" : "#8c8c8c");
    if (p.shape == ShapeKind::Cylinder) {
      c.body << "<circle cx=\"" << c.x(p.center.x()) << "\" cy=\"" << c.y(p.center.y()) << "\" r=\""
             << p.radius() * kPxPerMeter << "\" fill=\"" << fill << "\"/>\n";
      continue;
    }
    const Eigen::Rotation2Dd rot(deg2rad(p.yaw_deg));
    const Vec2 h = p.half().head<2>();
    c.body << "<polygon fill=\"" << fill << "\" points=\"";
    for (const Vec2& corner : {Vec2(-h.x(), -h.y()), Vec2(h.x(), -h.y()), Vec2(h.x(), h.y()), Vec2(-h.x(), h.y())}) {
      const Vec2 w = p.center2d() + rot * corner;
      c.body << c.x(w.x()) << "," << c.y(w.y()) << " ";
    }
    c.body << "\"/>\n";
    if (p.operation_direction) {
      const Vec2 a = p.center2d();
      const Vec2 b = a + *p.operation_direction * (p.boundary_along(*p.operation_direction) + 0.3);
      c.body << "<line x1=\"" << c.x(a.x()) << "\" y1=\"" << c.y(a.y()) << "\" x2=\"" << c.x(b.x()) << "\" y2=\""
             << c.y(b.y()) << "\" stroke=\"#ffffff\" stroke-width=\"2\"/>\n";
    }
  }
}

void draw_pose(Canvas& c, const Vec2& p, double heading_deg, const std::string& color) {
  const Vec2 tip = p + 0.3 * Vec2(std::cos(deg2rad(heading_deg)), std::sin(deg2rad(heading_deg)));
  c.body << "<circle cx=\"" << c.x(p.x()) << "\" cy=\"" << c.y(p.y()) << "\" r=\"6\" fill=\"" << color << "\"/>\n"
         << "<line x1=\"" << c.x(p.x()) << "\" y1=\"" << c.y(p.y()) << "\" x2=\"" << c.x(tip.x()) << "\" y2=\""
         << c.y(tip.y()) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
}

Vec2 read_vec(const ordered_json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::MalformedTrace, "expected a 2D point");
  return {j[0].get<double>(), j[1].get<double>()};
}

void write_file(const std::filesystem::path& path, const std::string& text, Outputs& out) {
  std::ofstream(path, std::ios::binary) << text;
  out.files.push_back(path);
}

}  // namespace

Outputs render(const SceneSpec& scene, const EpisodeTrace* trace, const std::filesystem::path& out_dir,
               double map_resolution) {
  std::filesystem::create_directories(out_dir);
  Outputs out;
  {
    const auto map = build_occupancy_map(scene, map_resolution);
    std::ofstream f(out_dir / "occupancy.pgm", std::ios::binary);
    write_pgm(f, map.to_gray());
    out.files.push_back(out_dir / "occupancy.pgm");
  }
  const std::string target = scene.tasks.empty() ? std::string() : scene.tasks.front().label;
  {
    Canvas c{scene.floor, {}};
    draw_primitives(c, scene, target);
    for (const auto& p : scene.capture_poses) draw_pose(c, p.position, p.heading_deg, "#1f77b4");
    draw_pose(c, scene.start.position, scene.start.heading_deg, "#2ca02c");
    write_file(out_dir / "scene.svg", c.finish(), out);
  }
  if (!trace) return out;

  try {
    std::string label = target;
    if (const auto* s = trace->find("start")) label = s->value("label", target);

    if (const auto* g = trace->find("task_grid"); g && g->contains("cells")) {
      const TaskGrid grid = decode_grid(read_vec(g->at("grid_center")), g->at("half_extent").get<double>(),
                                        g->at("resolution").get<double>(), g->at("cells").get<std::string>());
      std::ofstream f(out_dir / "taskgrid.ppm", std::ios::binary);
      write_ppm(f, grid.to_rgb());
      out.files.push_back(out_dir / "taskgrid.ppm");
    }

    Canvas c{scene.floor, {}};
    draw_primitives(c, scene, label);
    for (const auto& e : trace->events()) {
      if (e["event"] != "path") continue;
      c.body << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
      for (const auto& w : e.at("waypoints")) {
        const Vec2 p = read_vec(w);
        c.body << c.x(p.x()) << "," << c.y(p.y()) << " ";
      }
      c.body << "\"/>\n";
    }
    int chosen = -1;
    if (const auto* t = trace->find("target")) chosen = t->at("marker").get<int>();
    if (const auto* cands = trace->find("candidates")) {
      const CandidateSet set = candidate_set_from_json(*cands);
      for (const auto& circle : set.circles) {
        const bool is_chosen = circle.marker == chosen;
        c.body << "<circle cx=\"" << c.x(circle.center.x()) << "\" cy=\"" << c.y(circle.center.y()) << "\" r=\""
               << circle.radius * kPxPerMeter << "\" fill=\"none\" stroke=\"" << (is_chosen ? "#ff7f0e" : "#2ca02c")
               << "\" stroke-width=\"" << (is_chosen ? 4 : 2) << "\" class=\"candidate\"/>\n"
               << "<text x=\"" << c.x(circle.center.x()) << "\" y=\"" << c.y(circle.center.y()) + 5
               << "\" font-size=\"14\" text-anchor=\"middle\" fill=\"#000000\">" << circle.marker << "</text>\n";
        ++out.circles;
      }
    }
    if (const auto* end = trace->find("end")) {
      const auto& st = end->at("state");
      draw_pose(c, read_vec(st.at("position")), st.at("heading_deg").get<double>(), "#9467bd");
    }
    write_file(out_dir / "overlay.svg", c.finish(), out);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTrace, e.what());
  }
  return out;
}

}  // namespace navgaze::viz
