#include <cmath>
#include <random>

#include "doctest.h"
#include "roadnet/errors.hpp"
#include "roadnet/graphspace.hpp"
#include "test_support.hpp"

using namespace roadnet;

namespace {

GraphFunction random_function(const PatternGraph& g, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  GraphFunction u(g.n_vertices());
  for (auto& v : u) v = gauss(rng);
  return u;
}

}  // namespace

TEST_CASE("periodic graph identifies boundary vertices") {
  auto u = unfold(fixture("hline"), {0.0, 0.0}, 0.5);
  auto periodic = build_graph(u, 0.5, true);
  CHECK(periodic.n_vertices() == 2);
  CHECK(periodic.edges.size() == 2);
  CHECK(periodic.total_length() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kernel_dim(periodic) == 1);

  auto open = build_graph(u, 0.5, false);
  CHECK(open.n_vertices() == 3);
  CHECK(open.edges.size() == 2);
  CHECK(kernel_dim(open) == 1);

  for (const auto& e : periodic.edges) {
    CHECK(e.length == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm(e.tangent) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("connected fixtures have one component") {
  for (const char* name :
       {"hline", "diagonal", "grid", "hexagon", "circle", "circle_segment", "five_arcs",
        "tjunction"}) {
    CAPTURE(name);
    auto g = build_graph(unfold(fixture(name), {0.0, 0.0}, 0.05), 0.05, true);
    CHECK(kernel_dim(g) == 1);
    CHECK(g.n_components == 1);
    CHECK(g.total_length() ==
          doctest::Approx(total_length(discretize(fixture(name), 0.05))).epsilon(1e-9));
  }
  auto empty = build_graph(unfold(fixture("empty"), {0.0, 0.0}, 0.05), 0.05, true);
  CHECK(empty.n_vertices() == 0);
  CHECK(kernel_dim(empty) == 0);
}

TEST_CASE("disconnected pattern splits into components") {
  auto p = parse_pattern(R"({"name": "two_parts", "arcs": [
    {"type": "segment", "p": [0.0, 0.2], "q": [1.0, 0.2]},
    {"type": "circle", "center": [0.5, 0.65], "radius": 0.1}
  ]})");
  auto g = build_graph(unfold(p, {0.0, 0.0}, 0.05), 0.05, true);
  CHECK(kernel_dim(g) == 2);
  CHECK(g.n_components == 2);
  for (int label : g.component) {
    CHECK(label >= 0);
    CHECK(label < 2);
  }
}

TEST_CASE("two-point poincare quotient on the periodic line") {
  auto g = build_graph(unfold(fixture("hline"), {0.0, 0.0}, 0.5), 0.5, true);
  REQUIRE(g.n_vertices() == 2);
  GraphFunction u(2);
  for (int i = 0; i < 2; ++i) u[i] = std::abs(g.positions[i].x - 0.5) < 1e-12 ? 1.0 : 0.0;
  // Hat function on a two-edge cycle of length 1: ||u - <u>||^2 = 1/12 and
  // the slope seminorm is 4, so the quotient is exactly 1/48.
  CHECK(poincare_ratio(g, u) == doctest::Approx(1.0 / 48.0).epsilon(1e-13));
}

TEST_CASE("poincare quotient is bounded by one on connected graphs") {
  std::mt19937 rng(101);
  for (const char* name : {"hline", "grid", "hexagon", "circle", "circle_segment", "five_arcs"}) {
    CAPTURE(name);
    auto g = build_graph(unfold(fixture(name), {0.0, 0.0}, 0.05), 0.05, true);
    for (int trial = 0; trial < 200; ++trial) {
      double r = poincare_ratio(g, random_function(g, rng));
      CHECK(r >= 0.0);
      CHECK(r <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("slope distance closed forms on straight fixtures") {
  auto dk = [](const char* name, int k) {
    return compute_dk(unfold(fixture(name), {0.0, 0.0}, 0.05), k, 0.05);
  };
  // A straight line through the cell matches its own slope exactly in the
  // parallel direction and contributes length in the orthogonal one.
  CHECK(dk("hline", 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dk("hline", 2) <= 1e-6);
  CHECK(dk("grid", 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dk("grid", 2) == doctest::Approx(1.0).epsilon(1e-12));
  // The diagonal splits its length evenly between the two directions.
  double d1 = dk("diagonal", 1), d2 = dk("diagonal", 2);
  CHECK(d1 * d1 == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(d2 * d2 == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  // The dangling stub absorbs its vertical slope with a graph function.
  CHECK(dk("tjunction", 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dk("tjunction", 2) <= 1e-6);

  CHECK_THROWS_AS(compute_dk(unfold(fixture("hline"), {0.0, 0.0}, 0.05), 3, 0.05),
                  ParameterError);
}

TEST_CASE("slope distance squared never exceeds the pattern length") {
  for (const char* name : {"hline", "diagonal", "grid", "hexagon", "tjunction", "circle",
                           "circle_segment", "five_arcs"}) {
    CAPTURE(name);
    auto u = unfold(fixture(name), {0.0, 0.0}, 0.05);
    double d1 = compute_dk(u, 1, 0.05), d2 = compute_dk(u, 2, 0.05);
    CHECK(d1 * d1 + d2 * d2 <= u.total_length() + 1e-9);
  }
}

TEST_CASE("offset maximization of the slope distance") {
  auto hline = compute_d(fixture("hline"), 4, 0.05);
  CHECK(hline.d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hline.table.size() >= 16);
  for (const auto& s : hline.table) {
    CHECK(s.d1sq == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.d2sq <= 1e-10);
    CHECK(s.components == 1);
    CHECK(s.sum() == doctest::Approx(s.d1sq + s.d2sq).epsilon(1e-14));
  }

  // A plain circle admits exact slope potentials at every offset.
  auto circle = compute_d(fixture("circle"), 4, 0.02);
  CHECK(circle.d <= 1e-6);

  auto mixed = compute_d(fixture("circle_segment"), 4, 0.05);
  CHECK(mixed.d > 0.5);
  CHECK(mixed.d * mixed.d <= total_length(discretize(fixture("circle_segment"), 0.05)) + 1e-9);
}
