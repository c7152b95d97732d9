#include <cmath>
#include <random>

#include "doctest.h"
#include "roadnet/errors.hpp"
#include "roadnet/fem.hpp"
#include "roadnet/mesh.hpp"
#include "test_support.hpp"

using namespace roadnet;

namespace {

PeriodicMesh mesh_fixture(const char* name, double h) {
  return build_mesh(unfold(fixture(name), {0.0, 0.0}, h), h);
}

std::vector<double> values_by_dof(const AssembledSystem& sys,
                                  const std::vector<double>& vertex_values) {
  std::vector<double> out(sys.dofs.n_dofs, 0.0);
  for (size_t v = 0; v < vertex_values.size(); ++v)
    out[sys.dofs.vertex_to_dof[v]] = vertex_values[v];
  return out;
}

}  // namespace

TEST_CASE("dof map folds periodic slaves onto masters") {
  auto mesh = mesh_fixture("hexagon", 0.05);
  auto dofs = build_dof_map(mesh);
  CHECK(dofs.n_dofs == mesh.n_vertices() - (int)mesh.periodic_map.size());
  for (auto [slave, master] : mesh.periodic_map)
    CHECK(dofs.vertex_to_dof[slave] == dofs.vertex_to_dof[master]);
  for (int d : dofs.vertex_to_dof) {
    CHECK(d >= 0);
    CHECK(d < dofs.n_dofs);
  }
}

TEST_CASE("shape function gradients reproduce linear fields") {
  auto mesh = mesh_fixture("circle", 0.05);
  double area_sum = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto g = triangle_gradients(mesh, t);
    CHECK(g.area == doctest::Approx(mesh.triangle_area(t)).epsilon(1e-12));
    area_sum += g.area;

    Vec2 grad_sum = g.grad[0] + g.grad[1] + g.grad[2];
    CHECK(std::abs(grad_sum.x) <= 1e-10);
    CHECK(std::abs(grad_sum.y) <= 1e-10);

    Vec2 coeff{2.0, -1.0};
    Vec2 reproduced{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      double f = 3.0 + dot(coeff, mesh.vertices[mesh.triangles[t][i]]);
      reproduced = reproduced + f * g.grad[i];
    }
    CHECK(reproduced.x == doctest::Approx(coeff.x).epsilon(1e-9));
    CHECK(reproduced.y == doctest::Approx(coeff.y).epsilon(1e-9));
  }
  CHECK(area_sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("assembled operator is symmetric positive with constant kernel") {
  auto mesh = mesh_fixture("circle_segment", 0.05);
  auto sys = assemble_effective(mesh, 2.0);
  int n = sys.dofs.n_dofs;
  REQUIRE(sys.matrix.n == n);

  std::vector<double> ones(n, 1.0), y(n);
  sys.matrix.multiply(ones, y);
  for (double v : y) CHECK(std::abs(v) <= 1e-12);

  std::mt19937 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(n), z(n), ax(n), az(n);
    for (int i = 0; i < n; ++i) x[i] = gauss(rng), z[i] = gauss(rng);
    sys.matrix.multiply(x, ax);
    sys.matrix.multiply(z, az);
    CHECK(std::abs(dot_vec(z, ax) - dot_vec(x, az)) <= 1e-10 * norm_vec(ax) * norm_vec(z));
    CHECK(dot_vec(x, ax) >= -1e-10);
  }

  for (int k = 0; k < 2; ++k) {
    double total = 0.0;
    for (double v : sys.load[k]) total += v;
    CHECK(std::abs(total) <= 1e-12);
  }
  for (double m : sys.mass) CHECK(m > 0.0);
}

TEST_CASE("balanced patterns assemble identically zero loads") {
  for (const char* name : {"hline", "diagonal", "grid", "hexagon"}) {
    CAPTURE(name);
    auto sys = assemble_effective(mesh_fixture(name, 0.05), 1.0);
    CHECK(load_linf(sys, 1) == 0.0);
    CHECK(load_linf(sys, 2) == 0.0);

    auto w = solve_corrector(sys, 1);
    CHECK(w.iterations == 0);
    for (double v : w.values) CHECK(v == 0.0);
  }
  auto curved = assemble_effective(mesh_fixture("circle", 0.05), 1.0);
  CHECK(load_linf(curved, 1) > 0.0);
}

TEST_CASE("correctors are mean zero and converged") {
  auto mesh = mesh_fixture("circle", 0.02);
  auto sys = assemble_effective(mesh, 1.0);
  for (int k : {1, 2}) {
    auto w = solve_corrector(sys, k);
    CHECK(w.iterations > 0);
    CHECK(w.relative_residual <= 1e-10);
    REQUIRE((int)w.values.size() == mesh.n_vertices());

    auto by_dof = values_by_dof(sys, w.values);
    double mean = dot_vec(sys.mass, by_dof);
    double scale = 0.0;
    for (double v : by_dof) scale = std::max(scale, std::abs(v));
    CHECK(std::abs(mean) <= 1e-12 * std::max(1.0, scale));

    for (auto [slave, master] : mesh.periodic_map) CHECK(w.values[slave] == w.values[master]);
  }

  CHECK_THROWS_AS(assemble_effective(mesh, 0.0), ParameterError);
}

TEST_CASE("flux and interface diagnostics converge under refinement") {
  // The centered circle solution is radially symmetric, so vertex fluxes
  // balance to rounding even on coarse meshes.
  auto mesh = mesh_fixture("circle", 0.04);
  auto sys = assemble_effective(mesh, 1.0);
  auto w = solve_corrector(sys, 1);
  CHECK(kirchhoff_residual(mesh, 1.0, 1, w.values) <= 1e-10);

  double road_coarse = road_condition_residual(mesh, 1.0, 1, w.values);
  auto fine = mesh_fixture("circle", 0.02);
  auto wf = solve_corrector(assemble_effective(fine, 1.0), 1);
  double road_fine = road_condition_residual(fine, 1.0, 1, wf.values);
  CHECK(road_coarse > 0.0);
  CHECK(road_fine < road_coarse);

  // Junction patterns keep a bounded, shrinking flux defect.
  auto tj_coarse = mesh_fixture("tjunction", 0.05);
  auto tj_fine = mesh_fixture("tjunction", 0.025);
  auto wc = solve_corrector(assemble_effective(tj_coarse, 1.0), 2);
  auto wn = solve_corrector(assemble_effective(tj_fine, 1.0), 2);
  double kc = kirchhoff_residual(tj_coarse, 1.0, 2, wc.values);
  double kn = kirchhoff_residual(tj_fine, 1.0, 2, wn.values);
  CHECK(kc < 0.2);
  CHECK(kn < kc);
}

TEST_CASE("strip assembly matches the effective operator structure") {
  auto unfolded = unfold(fixture("circle"), {0.0, 0.0}, 0.04);
  auto mesh = build_mesh(unfolded, 0.04, 0.02);
  auto sys = assemble_delta(mesh, 1.0);
  int n = sys.dofs.n_dofs;

  std::vector<double> ones(n, 1.0), y(n);
  sys.matrix.multiply(ones, y);
  for (double v : y) CHECK(std::abs(v) <= 1e-10);

  for (int k = 0; k < 2; ++k) {
    double total = 0.0;
    for (double v : sys.load[k]) total += v;
    CHECK(std::abs(total) <= 1e-10);
  }

  auto w = solve_corrector(sys, 1);
  CHECK(w.relative_residual <= 1e-10);
  CHECK(w.iterations > 0);
}
