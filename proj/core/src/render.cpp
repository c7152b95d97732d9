#include "roadnet/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

constexpr double kMargin = 20.0;
constexpr double kScale = 800.0;
constexpr double kSize = kScale + 2.0 * kMargin;

double px(double x) { return kMargin + kScale * x; }
double py(double y) { return kMargin + kScale * (1.0 - y); }

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string svg_open() {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)kSize << "\" height=\""
     << (int)kSize << "\" viewBox=\"0 0 " << (int)kSize << " " << (int)kSize << "\">\n";
  os << "<rect x=\"" << coord(kMargin) << "\" y=\"" << coord(kMargin) << "\" width=\""
     << coord(kScale) << "\" height=\"" << coord(kScale)
     << "\" fill=\"white\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  return os.str();
}

void polyline(std::ostringstream& os, const std::vector<Vec2>& pts, const char* color,
              double width) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
     << "\" points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) os << " ";
    os << coord(px(pts[i].x)) << "," << coord(py(pts[i].y));
  }
  os << "\"/>\n";
}

// compact blue-to-yellow map (viridis-style stops, linearly interpolated)
const double kStops[9][3] = {
    {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
    {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
    {0.135, 0.659, 0.518}, {0.478, 0.821, 0.318}, {0.993, 0.906, 0.144}};

std::string colormap(double t) {
  t = std::clamp(t, 0.0, 1.0);
  double pos = t * 8.0;
  int i = std::min(7, (int)pos);
  double f = pos - i;
  char buf[8];
  std::string out = "#";
  for (int c = 0; c < 3; ++c) {
    int v = (int)std::lround(255.0 * (kStops[i][c] + f * (kStops[i + 1][c] - kStops[i][c])));
    std::snprintf(buf, sizeof buf, "%02x", std::clamp(v, 0, 255));
    out += buf;
  }
  return out;
}

void triangle_path(std::ostringstream& os, Vec2 a, Vec2 b, Vec2 c, const std::string& fill,
                   const char* stroke, double width) {
  os << "<path d=\"M" << coord(px(a.x)) << " " << coord(py(a.y)) << " L" << coord(px(b.x)) << " "
     << coord(py(b.y)) << " L" << coord(px(c.x)) << " " << coord(py(c.y)) << " Z\" fill=\"" << fill
     << "\"";
  if (stroke) os << " stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"";
  os << "/>\n";
}

}  // namespace

std::string render_pattern_svg(const TorusPattern& pattern) {
  std::ostringstream os;
  os << svg_open();
  UnfoldedPattern unf = unfold(pattern, {0.0, 0.0}, 0.005);
  for (const auto& piece : unf.pieces) polyline(os, piece.points, "#b03030", 3.0);
  os << "</svg>\n";
  return os.str();
}

std::string render_mesh_svg(const PeriodicMesh& mesh) {
  std::ostringstream os;
  os << svg_open();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    bool road = !mesh.region_tag.empty() && mesh.region_tag[t] == 1;
    triangle_path(os, mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]],
                  road ? "#f2d6a0" : "none", "#9999bb", 0.5);
  }
  for (const auto& e : mesh.pattern_edges)
    polyline(os, {mesh.vertices[e.a], mesh.vertices[e.b]}, "#b03030", 2.0);
  os << "</svg>\n";
  return os.str();
}

std::string render_field_svg(const PeriodicMesh& mesh, const std::vector<double>& values) {
  if ((int)values.size() != mesh.n_vertices())
    throw ParameterError("render_field_svg: field size does not match the mesh");
  double lo = 0.0, hi = 0.0;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
  }
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;
  std::ostringstream os;
  os << svg_open();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    double v = (values[tr[0]] + values[tr[1]] + values[tr[2]]) / 3.0;
    triangle_path(os, mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]],
                  colormap((v - lo) / span), nullptr, 0.0);
  }
  for (const auto& e : mesh.pattern_edges)
    polyline(os, {mesh.vertices[e.a], mesh.vertices[e.b]}, "#ffffff", 1.5);
  os << "</svg>\n";
  return os.str();
}

}  // namespace roadnet
