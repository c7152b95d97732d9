#include <cmath>

#include "doctest.h"
#include "roadnet/balance.hpp"
#include "test_support.hpp"

using namespace roadnet;

TEST_CASE("balanced fixtures satisfy all three conditions") {
  for (const char* name : {"empty", "hline", "diagonal", "grid", "hexagon"}) {
    CAPTURE(name);
    auto r = check_balance(fixture(name));
    CHECK(r.straight_ok);
    CHECK(r.node_degree_ok);
    CHECK(r.balance_ok);
    CHECK(r.is_balanced);
    CHECK(r.non_straight_arcs.empty());
    CHECK(r.low_degree_nodes.empty());
  }
}

TEST_CASE("grid and hexagon node residuals vanish exactly") {
  for (const char* name : {"grid", "hexagon"}) {
    CAPTURE(name);
    auto r = check_balance(fixture(name));
    CHECK(r.max_residual == 0.0);
    for (const auto& node : r.nodes) {
      CHECK(node.residual.x == 0.0);
      CHECK(node.residual.y == 0.0);
    }
    // Bitwise-zero residuals survive an arbitrarily tight tolerance.
    CHECK(check_balance(fixture(name), 1e-300).is_balanced);
  }
}

TEST_CASE("curved arcs break the straightness condition") {
  auto r = check_balance(fixture("circle"));
  CHECK_FALSE(r.straight_ok);
  CHECK_FALSE(r.is_balanced);
  REQUIRE(r.non_straight_arcs.size() == 1);
  CHECK(r.non_straight_arcs[0] == 0);

  auto rs = check_balance(fixture("circle_segment"));
  CHECK_FALSE(rs.straight_ok);
  CHECK(rs.non_straight_arcs.size() == 2);
}

TEST_CASE("dangling ends and unbalanced tangents are reported per node") {
  auto r = check_balance(fixture("tjunction"));
  CHECK(r.straight_ok);
  CHECK_FALSE(r.node_degree_ok);
  CHECK_FALSE(r.balance_ok);
  CHECK_FALSE(r.is_balanced);
  CHECK(r.max_residual == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.nodes.size() == 2);
  REQUIRE(r.low_degree_nodes.size() == 1);
  CHECK(r.low_degree_nodes[0].distinct_arcs == 1);

  bool found_center = false;
  for (const auto& node : r.nodes)
    if (std::abs(node.position.x - 0.5) < 1e-9 && std::abs(node.position.y - 0.5) < 1e-9) {
      found_center = true;
      // Two horizontal tangents cancel; the stub leaves a unit residual.
      CHECK(std::abs(node.residual.x) <= 1e-12);
      CHECK(node.residual_norm == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(node.distinct_arcs == 3);
    }
  CHECK(found_center);

  // Loosening the residual tolerance fixes balance_ok but not the degree.
  auto loose = check_balance(fixture("tjunction"), 1.5);
  CHECK(loose.balance_ok);
  CHECK_FALSE(loose.node_degree_ok);
  CHECK_FALSE(loose.is_balanced);
}

TEST_CASE("closed random loops fail balance only through straightness") {
  std::mt19937 rng(11);
  auto p = random_loop(rng);
  auto r = check_balance(p);
  // A polyline loop has corners, so its single arc is not straight; it has
  // no nodes at all, so the degree and residual conditions hold vacuously.
  CHECK_FALSE(r.straight_ok);
  CHECK(r.node_degree_ok);
  CHECK(r.balance_ok);
  CHECK(r.nodes.empty());
}
