#include "roadnet/pattern_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ParseError(where + ": unknown key \"" + it.key() + "\"");
}

Vec2 read_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

double read_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing key \"" + key + "\"");
  if (!obj[key].is_number()) throw ParseError(where + ": \"" + key + "\" must be a number");
  return obj[key].get<double>();
}

Vec2 read_point_field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing key \"" + key + "\"");
  return read_point(obj[key], where + "." + key);
}

ArcSpec read_arc(const json& j, int index) {
  std::ostringstream os;
  os << "arcs[" << index << "]";
  std::string where = os.str();
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  if (!j.contains("type") || !j["type"].is_string())
    throw ParseError(where + ": missing string key \"type\"");
  std::string type = j["type"].get<std::string>();
  if (type == "segment") {
    require_keys(j, {"type", "p", "q"}, where);
    return SegmentSpec{read_point_field(j, "p", where), read_point_field(j, "q", where)};
  }
  if (type == "circle") {
    require_keys(j, {"type", "center", "radius"}, where);
    return CircleSpec{read_point_field(j, "center", where), read_number(j, "radius", where)};
  }
  if (type == "arc") {
    require_keys(j, {"type", "center", "radius", "theta0", "theta1"}, where);
    return CircularArcSpec{read_point_field(j, "center", where), read_number(j, "radius", where),
                           read_number(j, "theta0", where), read_number(j, "theta1", where)};
  }
  if (type == "polyline") {
    require_keys(j, {"type", "points"}, where);
    if (!j.contains("points") || !j["points"].is_array())
      throw ParseError(where + ": missing array key \"points\"");
    PolylineSpec poly;
    for (size_t i = 0; i < j["points"].size(); ++i) {
      std::ostringstream ps;
      ps << where << ".points[" << i << "]";
      poly.points.push_back(read_point(j["points"][i], ps.str()));
    }
    return poly;
  }
  throw ParseError(where + ": unknown arc type \"" + type + "\"");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

TorusPattern parse_pattern(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("pattern file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("pattern file: top level must be an object");
  require_keys(j, {"name", "arcs"}, "pattern file");
  if (!j.contains("name") || !j["name"].is_string())
    throw ParseError("pattern file: missing string key \"name\"");
  if (!j.contains("arcs") || !j["arcs"].is_array())
    throw ParseError("pattern file: missing array key \"arcs\"");
  std::vector<ArcSpec> arcs;
  for (size_t i = 0; i < j["arcs"].size(); ++i) arcs.push_back(read_arc(j["arcs"][i], (int)i));
  return TorusPattern(j["name"].get<std::string>(), std::move(arcs));
}

TorusPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open pattern file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern(buf.str());
}

std::string pattern_to_json(const TorusPattern& pattern) {
  std::ostringstream os;
  os << "{\n  \"name\": \"" << pattern.name() << "\",\n  \"arcs\": [";
  bool first = true;
  for (const auto& arc : pattern.arcs()) {
    os << (first ? "\n" : ",\n");
    first = false;
    os << "    {\"type\": \"" << arc_type_name(arc) << "\"";
    if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
      os << ", \"p\": [" << format_number(s->p.x) << ", " << format_number(s->p.y) << "]";
      os << ", \"q\": [" << format_number(s->q.x) << ", " << format_number(s->q.y) << "]";
    } else if (const auto* c = std::get_if<CircleSpec>(&arc)) {
      os << ", \"center\": [" << format_number(c->center.x) << ", " << format_number(c->center.y)
         << "], \"radius\": " << format_number(c->radius);
    } else if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
      os << ", \"center\": [" << format_number(a->center.x) << ", " << format_number(a->center.y)
         << "], \"radius\": " << format_number(a->radius) << ", \"theta0\": "
         << format_number(a->theta0) << ", \"theta1\": " << format_number(a->theta1);
    } else {
      const auto& p = std::get<PolylineSpec>(arc);
      os << ", \"points\": [";
      for (size_t i = 0; i < p.points.size(); ++i) {
        if (i) os << ", ";
        os << "[" << format_number(p.points[i].x) << ", " << format_number(p.points[i].y) << "]";
      }
      os << "]";
    }
    os << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

}  // namespace roadnet
