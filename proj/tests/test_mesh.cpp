#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "doctest.h"
#include "roadnet/errors.hpp"
#include "roadnet/mesh.hpp"
#include "test_support.hpp"

using namespace roadnet;

namespace {

PeriodicMesh mesh_fixture(const char* name, double h,
                          std::optional<double> delta = std::nullopt) {
  return build_mesh(unfold(fixture(name), {0.0, 0.0}, h), h, delta);
}

std::map<std::pair<int, int>, int> edge_incidence(const PeriodicMesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  return count;
}

bool is_boundary_vertex(Vec2 p) {
  return p.x < 1e-12 || p.x > 1.0 - 1e-12 || p.y < 1e-12 || p.y > 1.0 - 1e-12;
}

}  // namespace

TEST_CASE("meshes are watertight and respect the quality floor") {
  for (const char* name : {"empty", "grid", "hexagon", "circle", "five_arcs"}) {
    CAPTURE(name);
    auto mesh = mesh_fixture(name, 0.05);
    auto q = quality_report(mesh);
    CHECK(q.total_area == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.min_angle_deg >= 20.0 - 1e-9);
    CHECK(q.n_triangles == mesh.n_triangles());
    CHECK(q.n_vertices == mesh.n_vertices());
    for (int t = 0; t < mesh.n_triangles(); ++t) CHECK(mesh.triangle_area(t) > 0.0);
  }
}

TEST_CASE("pattern chords appear as conforming mesh edges") {
  for (const char* name : {"grid", "circle", "circle_segment"}) {
    CAPTURE(name);
    auto unfolded = unfold(fixture(name), {0.0, 0.0}, 0.05);
    auto mesh = build_mesh(unfolded, 0.05);
    auto incidence = edge_incidence(mesh);

    double chord_total = 0.0;
    for (const auto& e : mesh.pattern_edges) {
      chord_total += e.length;
      CHECK(dist(mesh.vertices[e.a], mesh.vertices[e.b]) ==
            doctest::Approx(e.length).epsilon(1e-12));
      CHECK(norm(e.tangent) == doctest::Approx(1.0).epsilon(1e-12));
      auto it = incidence.find({std::min(e.a, e.b), std::max(e.a, e.b)});
      REQUIRE(it != incidence.end());
      CHECK(it->second == 2);
    }
    CHECK(chord_total == doctest::Approx(unfolded.total_length()).epsilon(1e-12));
  }
}

TEST_CASE("every mesh edge bounds one or two triangles") {
  auto mesh = mesh_fixture("circle", 0.05);
  for (const auto& [edge, count] : edge_incidence(mesh)) {
    CHECK(count >= 1);
    CHECK(count <= 2);
    if (count == 1) {
      CHECK(is_boundary_vertex(mesh.vertices[edge.first]));
      CHECK(is_boundary_vertex(mesh.vertices[edge.second]));
    }
  }
}

TEST_CASE("periodic pairing maps far boundary onto near boundary") {
  auto mesh = mesh_fixture("hexagon", 0.05);
  CHECK(!mesh.periodic_map.empty());
  for (auto [slave, master] : mesh.periodic_map) {
    Vec2 gap = mesh.vertices[slave] - mesh.vertices[master];
    double gx = std::abs(gap.x), gy = std::abs(gap.y);
    bool on_x = std::abs(gx - 1.0) < 1e-12 && gy < 1e-12;
    bool on_y = std::abs(gy - 1.0) < 1e-12 && gx < 1e-12;
    bool corner = std::abs(gx - 1.0) < 1e-12 && std::abs(gy - 1.0) < 1e-12;
    CHECK((on_x || on_y || corner));
  }
}

TEST_CASE("road strips tag triangles and carry the right area") {
  auto plain = mesh_fixture("circle", 0.04);
  CHECK(plain.region_tag.empty());
  CHECK(!plain.delta.has_value());
  CHECK(quality_report(plain).road_area == 0.0);

  double delta = 0.02, r = 0.1;
  auto strip = mesh_fixture("circle", 0.04, delta);
  REQUIRE(strip.delta.has_value());
  CHECK(*strip.delta == delta);
  REQUIRE((int)strip.region_tag.size() == strip.n_triangles());
  auto q = quality_report(strip);
  CHECK(q.total_area == doctest::Approx(1.0).epsilon(1e-10));
  // One-sided strip on the outside of the clockwise circle.
  double expected = 2.0 * std::numbers::pi * (r + delta / 2.0) * delta;
  CHECK(q.road_area == doctest::Approx(expected).epsilon(0.02));

  // Each circle chord separates one road triangle from one bulk triangle.
  auto incidence = edge_incidence(strip);
  std::map<std::pair<int, int>, std::vector<int>> owners;
  for (int t = 0; t < strip.n_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      int a = strip.triangles[t][i], b = strip.triangles[t][(i + 1) % 3];
      owners[{std::min(a, b), std::max(a, b)}].push_back(t);
    }
  for (const auto& e : strip.pattern_edges) {
    auto& ts = owners[{std::min(e.a, e.b), std::max(e.a, e.b)}];
    REQUIRE(ts.size() == 2);
    CHECK(strip.region_tag[ts[0]] + strip.region_tag[ts[1]] == 1);
  }
}

TEST_CASE("strip construction rejects colliding geometry") {
  auto unfolded = unfold(fixture("circle_segment"), {0.0, 0.0}, 0.025);
  CHECK_THROWS_AS(build_mesh(unfolded, 0.025, 0.3), GeometryError);
}

TEST_CASE("parameter validation") {
  auto unfolded = unfold(fixture("grid"), {0.0, 0.0}, 0.05);
  CHECK_THROWS_AS(build_mesh(unfolded, 0.0), ParameterError);
  CHECK_THROWS_AS(build_mesh(unfolded, 1.5), ParameterError);
  CHECK_THROWS_AS(build_mesh(unfolded, 0.05, -0.1), ParameterError);
}

TEST_CASE("midpoint refinement preserves structure") {
  auto mesh = mesh_fixture("circle", 0.05, 0.02);
  auto fine = refine(mesh);

  CHECK(fine.n_triangles() == 4 * mesh.n_triangles());
  CHECK(fine.pattern_edges.size() == 2 * mesh.pattern_edges.size());
  CHECK(fine.h == doctest::Approx(mesh.h / 2.0).epsilon(1e-14));

  auto q0 = quality_report(mesh), q1 = quality_report(fine);
  CHECK(q1.total_area == doctest::Approx(1.0).epsilon(1e-10));
  // The four children of a triangle are similar to it, so the angle
  // histogram and the tagged areas are unchanged.
  CHECK(q1.min_angle_deg == doctest::Approx(q0.min_angle_deg).epsilon(1e-9));
  CHECK(q1.road_area == doctest::Approx(q0.road_area).epsilon(1e-9));

  double len0 = 0.0, len1 = 0.0;
  for (const auto& e : mesh.pattern_edges) len0 += e.length;
  for (const auto& e : fine.pattern_edges) len1 += e.length;
  CHECK(len1 == doctest::Approx(len0).epsilon(1e-12));

  for (auto [slave, master] : fine.periodic_map) {
    Vec2 gap = fine.vertices[slave] - fine.vertices[master];
    CHECK(std::abs(gap.x) + std::abs(gap.y) >= 1.0 - 1e-12);
  }
}

TEST_CASE("mesh dump round trip is byte identical") {
  auto mesh = mesh_fixture("circle", 0.05, 0.02);
  std::vector<double> field(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i) field[i] = std::sin(7.0 * i);

  auto text = dump_mesh(mesh, {{"w1", field}});
  auto dump = parse_mesh_dump(text);
  CHECK(dump.mesh.n_vertices() == mesh.n_vertices());
  CHECK(dump.mesh.n_triangles() == mesh.n_triangles());
  CHECK(dump.mesh.pattern_edges.size() == mesh.pattern_edges.size());
  CHECK(dump.mesh.periodic_map.size() == mesh.periodic_map.size());
  CHECK(dump.mesh.region_tag.size() == mesh.region_tag.size());
  REQUIRE(dump.fields.size() == 1);
  CHECK(dump.fields[0].first == "w1");
  REQUIRE(dump.fields[0].second.size() == field.size());

  CHECK(dump_mesh(dump.mesh, dump.fields) == text);

  CHECK_THROWS_AS(parse_mesh_dump("not a mesh dump"), ParseError);
  CHECK_THROWS_AS(load_mesh_dump("/nonexistent/mesh.txt"), ParseError);
}
