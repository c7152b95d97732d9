#include <cmath>
#include <numbers>

#include "doctest.h"
#include "roadnet/mesh.hpp"
#include "roadnet/tensor.hpp"
#include "test_support.hpp"

using namespace roadnet;

namespace {

TensorResult solve_fixture(const char* name, double a, double h, Vec2 offset = {0.0, 0.0}) {
  auto mesh = build_mesh(unfold(fixture(name), offset, h), h);
  return effective_tensor(mesh, a);
}

void check_tensor(const EffectiveTensor& got, double s11, double s12, double s22, double tol) {
  CHECK(got.s11 == doctest::Approx(s11).epsilon(tol));
  CHECK(got.s22 == doctest::Approx(s22).epsilon(tol));
  CHECK(std::abs(got.s12 - s12) <= tol * std::max(1.0, std::abs(s12)));
}

}  // namespace

TEST_CASE("tensor algebra helpers") {
  EffectiveTensor t{2.0, 1.0, 2.0, 0.0};
  auto [lo, hi] = t.eigenvalues();
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hi == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(t.trace() == 4.0);

  EffectiveTensor id{1.0, 0.0, 1.0, 0.0};
  CHECK(frobenius_norm(id) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(frobenius_gap(t, id) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(frobenius_gap(id, id) == 0.0);
}

TEST_CASE("balanced fixtures reproduce closed-form tensors at any h") {
  for (double a : {0.5, 2.0}) {
    CAPTURE(a);
    auto hline = solve_fixture("hline", a, 0.1);
    check_tensor(hline.sigma, 1.0 + a, 0.0, 1.0, 1e-12);
    CHECK(hline.iterations == 0);

    auto grid = solve_fixture("grid", a, 0.1);
    check_tensor(grid.sigma, 1.0 + a, 0.0, 1.0 + a, 1e-12);

    double half = a * std::sqrt(2.0) / 2.0;
    auto diag = solve_fixture("diagonal", a, 0.1);
    check_tensor(diag.sigma, 1.0 + half, half, 1.0 + half, 1e-12);

    double l_hex = 1.0 + std::sqrt(3.0);
    auto hex = solve_fixture("hexagon", a, 0.1);
    CHECK(hex.sigma.trace() == doctest::Approx(2.0 + a * l_hex).epsilon(1e-12));
    CHECK(hex.sigma.s22 == doctest::Approx(1.0 + a).epsilon(1e-12));
    CHECK(std::abs(hex.sigma.s12) <= 1e-12);

    // The same closed forms hold on a finer mesh and at a shifted window.
    auto shifted = solve_fixture("diagonal", a, 0.05, {0.3, 0.7});
    check_tensor(shifted.sigma, 1.0 + half, half, 1.0 + half, 1e-12);
  }

  auto empty = solve_fixture("empty", 3.0, 0.1);
  check_tensor(empty.sigma, 1.0, 0.0, 1.0, 1e-14);
  CHECK(empty.pattern_length == 0.0);
}

TEST_CASE("flux and energy formulas agree and satisfy the trace identity") {
  for (const char* name : {"circle", "tjunction", "circle_segment"}) {
    CAPTURE(name);
    auto r = solve_fixture(name, 1.0, 0.04);
    CHECK(frobenius_gap(r.sigma, r.sigma_energy) <= 1e-10 * frobenius_norm(r.sigma));
    CHECK(r.trace_identity_defect <= 1e-10 * r.sigma.trace());
    CHECK(r.sigma.symmetry_defect <= 1e-10);
    CHECK(r.residual <= 1e-10);

    auto [lo, hi] = r.sigma.eigenvalues();
    CHECK(lo >= 1.0 - 1e-9);
    CHECK(hi <= 1.0 + 1.0 * r.pattern_length + 1e-9);
    CHECK(r.energy1 >= 0.0);
    CHECK(r.energy2 >= 0.0);
  }
}

TEST_CASE("corrector fields are returned on request") {
  auto mesh = build_mesh(unfold(fixture("circle"), {0.0, 0.0}, 0.04), 0.04);
  std::array<CorrectorField, 2> fields;
  auto r = effective_tensor(mesh, 1.0, {}, &fields);
  CHECK((int)fields[0].values.size() == mesh.n_vertices());
  CHECK((int)fields[1].values.size() == mesh.n_vertices());
  CHECK(fields[0].iterations == r.iterations);
  double linf = 0.0;
  for (double v : fields[0].values) linf = std::max(linf, std::abs(v));
  CHECK(linf > 0.0);
}

TEST_CASE("strip tensor matches the laminate closed form on a straight line") {
  double a = 2.0;
  for (double delta : {0.1, 0.05}) {
    CAPTURE(delta);
    auto mesh = build_mesh(unfold(fixture("hline"), {0.0, 0.0}, 0.05), 0.05, delta);
    auto r = delta_tensor(mesh, a);
    // Horizontal laminate with conductivity a/delta on the strip: the
    // parallel entry averages arithmetically, the transverse harmonically.
    CHECK(r.sigma.s11 == doctest::Approx(1.0 - delta + a).epsilon(1e-9));
    CHECK(r.sigma.s22 == doctest::Approx(1.0 / (1.0 - delta + delta * delta / a)).epsilon(1e-9));
    CHECK(std::abs(r.sigma.s12) <= 1e-9);
    CHECK(frobenius_gap(r.sigma, r.sigma_energy) <= 1e-9 * frobenius_norm(r.sigma));
  }
}

TEST_CASE("richardson extrapolation tightens the circle tensor") {
  auto rich = effective_richardson(fixture("circle"), {0.0, 0.0}, 1.0, 0.04);
  // Symmetry of the centered circle: isotropic tensor, zero off-diagonal.
  CHECK(std::abs(rich.extrapolated.s12) <= 1e-8);
  CHECK(rich.extrapolated.s11 == doctest::Approx(rich.extrapolated.s22).epsilon(1e-6));
  CHECK(rich.extrapolated.s11 == doctest::Approx(1.0539).epsilon(2e-3));

  // The fine solve lies between the coarse solve and the extrapolation.
  double coarse = rich.coarse.sigma.trace();
  double fine = rich.fine.sigma.trace();
  double extr = rich.extrapolated.trace();
  CHECK(std::abs(extr - fine) < std::abs(extr - coarse));
  CHECK(rich.energy1 > 0.0);
  // Both solves share the chords sampled once at h/2.
  CHECK(rich.fine.pattern_length ==
        doctest::Approx(rich.coarse.pattern_length).epsilon(1e-12));
}

TEST_CASE("strip tensors commute toward the effective tensor on the line") {
  auto report = commutation_sweep(fixture("hline"), 2.0, {0.1, 0.05, 0.025}, 0.05);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) CHECK(row.error.empty());
  REQUIRE(report.gaps.size() == 3);
  CHECK(report.gaps[0] > report.gaps[1]);
  CHECK(report.gaps[1] > report.gaps[2]);

  check_tensor(report.reference.extrapolated, 3.0, 0.0, 1.0, 1e-10);
  for (size_t i = 0; i < report.rows.size(); ++i) {
    double delta = *report.rows[i].delta;
    double e11 = delta;  // laminate gap per entry
    double e22 = 1.0 / (1.0 - delta + delta * delta / 2.0) - 1.0;
    CHECK(report.gaps[i] ==
          doctest::Approx(std::sqrt(e11 * e11 + e22 * e22)).epsilon(1e-6));
  }
  CHECK(report.empirical_order > 0.5);
}

TEST_CASE("small coupling expansion ratios") {
  auto balanced = small_a_sweep(fixture("grid"), {0.1, 0.2}, 0.05);
  REQUIRE(balanced.ratios.size() == 2);
  CHECK(balanced.ratios[0] == 0.0);
  CHECK(balanced.ratios[1] == 0.0);

  auto curved = small_a_sweep(fixture("circle"), {0.05, 0.1}, 0.04);
  REQUIRE(curved.ratios.size() == 2);
  CHECK(curved.ratios[0] > 0.0);
  CHECK(curved.ratios[1] > 0.0);
  CHECK(curved.ratios[0] > curved.ratios[1]);
  CHECK(curved.ratios[0] < 10.0);
}

TEST_CASE("trace bounds hold with exact slack on the line") {
  auto report = large_a_bound_check(fixture("hline"), {10.0, 100.0}, 1.0, 0.05);
  CHECK(report.pattern_length == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    CAPTURE(row.a);
    CHECK(row.lower_ok);
    CHECK(row.upper_ok);
    CHECK(row.trace == doctest::Approx(2.0 + row.a).epsilon(1e-10));
    CHECK(row.eps_h <= 1e-8);
    CHECK(row.lower <= row.trace + 1e-12 * row.trace);
    CHECK(row.trace <= row.upper + 1e-12 * row.trace);
  }
}

TEST_CASE("csv schema is stable") {
  auto header = tensor_csv_header();
  CHECK(header.find("# defaults: h=0.02 rtol=1e-10 grid_n=16 quality_floor_deg=20") == 0);
  CHECK(header.find("pattern,kind,a,delta,h,S11,S12,S22,trace,lower_bound,upper_bound,"
                    "energy1,energy2,iters,residual") != std::string::npos);

  TensorResult r;
  r.sigma = {3.0, 0.0, 1.0, 0.0};
  r.pattern_length = 1.0;
  auto row = tensor_csv_row("hline", "effective", 2.0, std::nullopt, 0.05, r);
  CHECK(row == "hline,effective,2,,0.05,3,0,1,4,1,3,0,0,0,0\n");

  auto with_delta = tensor_csv_row("hline", "delta", 2.0, 0.1, 0.05, r);
  CHECK(with_delta.find("hline,delta,2,0.1,0.05,") == 0);
}
