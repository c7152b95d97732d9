#include "roadnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "roadnet/errors.hpp"
#include "roadnet/parallel.hpp"

namespace roadnet {

std::pair<double, double> EffectiveTensor::eigenvalues() const {
  double m = 0.5 * (s11 + s22);
  double r = std::hypot(0.5 * (s11 - s22), s12);
  return {m - r, m + r};
}

double frobenius_norm(const EffectiveTensor& t) {
  return std::sqrt(t.s11 * t.s11 + 2.0 * t.s12 * t.s12 + t.s22 * t.s22);
}

double frobenius_gap(const EffectiveTensor& x, const EffectiveTensor& y) {
  EffectiveTensor d;
  d.s11 = x.s11 - y.s11;
  d.s12 = x.s12 - y.s12;
  d.s22 = x.s22 - y.s22;
  return frobenius_norm(d);
}

namespace {

EffectiveTensor symmetrize(double s11, double s12, double s21, double s22) {
  EffectiveTensor t;
  t.s11 = s11;
  t.s22 = s22;
  t.s12 = 0.5 * (s12 + s21);
  t.symmetry_defect = std::fabs(s12 - s21);
  return t;
}

}  // namespace

TensorResult effective_tensor(const PeriodicMesh& mesh, double a, const SolveOptions& options,
                              std::array<CorrectorField, 2>* fields) {
  AssembledSystem sys = assemble_effective(mesh, a);
  CorrectorField w[2] = {solve_corrector(sys, 1, options), solve_corrector(sys, 2, options)};

  TensorResult res;
  res.iterations = std::max(w[0].iterations, w[1].iterations);
  res.residual = std::max(w[0].relative_residual, w[1].relative_residual);

  double l = 0.0;
  double flux[2][2] = {{0.0, 0.0}, {0.0, 0.0}};   // a sum T_l (dw_k + T_k L)
  double road[2][2] = {{0.0, 0.0}, {0.0, 0.0}};   // a sum slope_k slope_l L
  double roadE[2] = {0.0, 0.0};                   // a sum (dw_k/L)^2 L
  for (const auto& e : mesh.pattern_edges) {
    l += e.length;
    double t[2] = {e.tangent.x, e.tangent.y};
    for (int k = 0; k < 2; ++k) {
      double dw = w[k].values[e.b] - w[k].values[e.a];
      roadE[k] += a * dw * dw / e.length;
      for (int m = 0; m < 2; ++m) flux[k][m] += a * t[m] * (dw + t[k] * e.length);
      for (int m = 0; m <= k; ++m) {
        double sk = dw / e.length + t[k];
        double sm = (w[m].values[e.b] - w[m].values[e.a]) / e.length + t[m];
        road[k][m] += a * sk * sm * e.length;
        road[m][k] = road[k][m];
      }
    }
  }
  res.pattern_length = l;

  double bulk[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // int (grad w_k + e_k).(grad w_l + e_l)
  double bulkE[2] = {0.0, 0.0};                  // int |grad w_k|^2
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    TriangleGradients g = triangle_gradients(mesh, t);
    const auto& tr = mesh.triangles[t];
    Vec2 gw[2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < 3; ++i) {
      gw[0] = gw[0] + w[0].values[tr[i]] * g.grad[i];
      gw[1] = gw[1] + w[1].values[tr[i]] * g.grad[i];
    }
    Vec2 f[2] = {gw[0] + Vec2{1.0, 0.0}, gw[1] + Vec2{0.0, 1.0}};
    for (int k = 0; k < 2; ++k) {
      bulkE[k] += g.area * norm2(gw[k]);
      for (int m = 0; m < 2; ++m) bulk[k][m] += g.area * dot(f[k], f[m]);
    }
  }

  res.sigma = symmetrize(1.0 + flux[0][0], flux[0][1], flux[1][0], 1.0 + flux[1][1]);
  res.sigma_energy = symmetrize(bulk[0][0] + road[0][0], bulk[0][1] + road[0][1],
                                bulk[1][0] + road[1][0], bulk[1][1] + road[1][1]);
  res.energy1 = bulkE[0] + roadE[0];
  res.energy2 = bulkE[1] + roadE[1];
  res.trace_identity_defect =
      std::fabs(res.sigma.trace() - (2.0 + a * l - res.energy1 - res.energy2));
  if (fields) {
    (*fields)[0] = std::move(w[0]);
    (*fields)[1] = std::move(w[1]);
  }
  return res;
}

TensorResult delta_tensor(const PeriodicMesh& mesh, double a, const SolveOptions& options,
                          std::array<CorrectorField, 2>* fields) {
  AssembledSystem sys = assemble_delta(mesh, a);
  CorrectorField w[2] = {solve_corrector(sys, 1, options), solve_corrector(sys, 2, options)};

  TensorResult res;
  res.iterations = std::max(w[0].iterations, w[1].iterations);
  res.residual = std::max(w[0].relative_residual, w[1].relative_residual);
  for (const auto& e : mesh.pattern_edges) res.pattern_length += e.length;

  double flux[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double energy[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double en[2] = {0.0, 0.0};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    TriangleGradients g = triangle_gradients(mesh, t);
    double s = mesh.region_tag[t] == 1 ? a / *mesh.delta : 1.0;
    const auto& tr = mesh.triangles[t];
    Vec2 gw[2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int i = 0; i < 3; ++i) {
      gw[0] = gw[0] + w[0].values[tr[i]] * g.grad[i];
      gw[1] = gw[1] + w[1].values[tr[i]] * g.grad[i];
    }
    Vec2 f[2] = {gw[0] + Vec2{1.0, 0.0}, gw[1] + Vec2{0.0, 1.0}};
    for (int k = 0; k < 2; ++k) {
      en[k] += s * g.area * norm2(gw[k]);
      flux[k][0] += s * g.area * f[k].x;
      flux[k][1] += s * g.area * f[k].y;
      for (int m = 0; m < 2; ++m) energy[k][m] += s * g.area * dot(f[k], f[m]);
    }
  }
  res.sigma = symmetrize(flux[0][0], flux[0][1], flux[1][0], flux[1][1]);
  res.sigma_energy =
      symmetrize(energy[0][0], energy[0][1], energy[1][0], energy[1][1]);
  res.energy1 = en[0];
  res.energy2 = en[1];
  res.trace_identity_defect = 0.0;  // the 2 + a l identity is specific to the effective problem
  if (fields) {
    (*fields)[0] = std::move(w[0]);
    (*fields)[1] = std::move(w[1]);
  }
  return res;
}

namespace {

EffectiveTensor extrapolate(const EffectiveTensor& coarse, const EffectiveTensor& fine) {
  EffectiveTensor t;
  t.s11 = fine.s11 + (fine.s11 - coarse.s11) / 3.0;
  t.s12 = fine.s12 + (fine.s12 - coarse.s12) / 3.0;
  t.s22 = fine.s22 + (fine.s22 - coarse.s22) / 3.0;
  t.symmetry_defect = fine.symmetry_defect;
  return t;
}

}  // namespace

RichardsonResult effective_richardson(const TorusPattern& pattern, Vec2 offset, double a,
                                      double h, const SolveOptions& options) {
  UnfoldedPattern unf = unfold(pattern, offset, h / 2.0);  // chords pinned for both meshes
  PeriodicMesh coarse_mesh = build_mesh(unf, h);
  PeriodicMesh fine_mesh = refine(coarse_mesh);
  RichardsonResult r;
  r.coarse = effective_tensor(coarse_mesh, a, options);
  r.fine = effective_tensor(fine_mesh, a, options);
  r.extrapolated = extrapolate(r.coarse.sigma, r.fine.sigma);
  r.energy1 = r.fine.energy1 + (r.fine.energy1 - r.coarse.energy1) / 3.0;
  r.energy2 = r.fine.energy2 + (r.fine.energy2 - r.coarse.energy2) / 3.0;
  return r;
}

CommutationReport commutation_sweep(const TorusPattern& pattern, double a,
                                    const std::vector<double>& deltas, double h,
                                    const SolveOptions& options) {
  for (size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i + 1]))
      throw ParameterError("commutation_sweep: deltas must be strictly decreasing");
  CommutationReport rep;
  rep.reference = effective_richardson(pattern, {0.0, 0.0}, a, h, options);
  rep.rows.resize(deltas.size());
  rep.gaps.assign(deltas.size(), -1.0);
  parallel_for(deltas.size(), [&](size_t i) {
    double d = deltas[i];
    SweepRow& row = rep.rows[i];
    row.a = a;
    row.delta = d;
    row.h = h;
    try {
      UnfoldedPattern unf = unfold(pattern, {0.0, 0.0}, std::min(h, d / 2.0));
      PeriodicMesh mesh = build_mesh(unf, h, d);
      row.result = delta_tensor(mesh, a, options);
      rep.gaps[i] = frobenius_gap(row.result.sigma, rep.reference.extrapolated);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  double first_gap = -1.0, first_d = 0.0, last_gap = -1.0, last_d = 0.0;
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (rep.gaps[i] < 0.0) continue;
    if (first_gap < 0.0) {
      first_gap = rep.gaps[i];
      first_d = deltas[i];
    }
    last_gap = rep.gaps[i];
    last_d = deltas[i];
  }
  if (first_gap > 0.0 && last_gap > 0.0 && first_d != last_d)
    rep.empirical_order = std::log(first_gap / last_gap) / std::log(first_d / last_d);
  return rep;
}

SmallAReport small_a_sweep(const TorusPattern& pattern, const std::vector<double>& a_values,
                           double h, const SolveOptions& options) {
  for (double a : a_values)
    if (!(a > 0.0)) throw ParameterError("small_a_sweep: a must be positive");
  UnfoldedPattern unf = unfold(pattern, {0.0, 0.0}, h / 2.0);
  PeriodicMesh coarse_mesh = build_mesh(unf, h);
  PeriodicMesh fine_mesh = refine(coarse_mesh);
  SmallAReport rep;
  rep.a_values = a_values;
  rep.ratios.assign(a_values.size(), 0.0);
  for (size_t i = 0; i < a_values.size(); ++i) {
    double a = a_values[i];
    TensorResult c = effective_tensor(coarse_mesh, a, options);
    TensorResult f = effective_tensor(fine_mesh, a, options);
    double e1 = f.energy1 + (f.energy1 - c.energy1) / 3.0;
    double e2 = f.energy2 + (f.energy2 - c.energy2) / 3.0;
    // by the trace identity, (2 + a l - trace)/a^2 is the energy sum over a^2
    rep.ratios[i] = (e1 + e2) / (a * a);
  }
  return rep;
}

LargeABoundReport large_a_bound_check(const TorusPattern& pattern,
                                      const std::vector<double>& a_values, double d_squared,
                                      double h, const SolveOptions& options) {
  UnfoldedPattern unf = unfold(pattern, {0.0, 0.0}, h / 2.0);
  PeriodicMesh coarse_mesh = build_mesh(unf, h);
  PeriodicMesh fine_mesh = refine(coarse_mesh);
  LargeABoundReport rep;
  rep.d_squared = d_squared;
  for (double a : a_values) {
    TensorResult c = effective_tensor(coarse_mesh, a, options);
    TensorResult f = effective_tensor(fine_mesh, a, options);
    LargeABoundRow row;
    row.a = a;
    row.trace = f.sigma.trace() + (f.sigma.trace() - c.sigma.trace()) / 3.0;
    row.eps_h = std::fabs(f.sigma.trace() - c.sigma.trace());
    rep.pattern_length = f.pattern_length;
    row.lower = 2.0 + a * d_squared;
    row.upper = 2.0 + a * rep.pattern_length;
    double tol = 1e-10 * (1.0 + row.upper);
    row.lower_ok = row.trace >= row.lower - row.eps_h - tol;
    row.upper_ok = row.trace <= row.upper + row.eps_h + tol;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string tensor_csv_header() {
  std::ostringstream os;
  os << "# defaults: h=0.02 rtol=1e-10 grid_n=16 quality_floor_deg=20\n";
  os << "pattern,kind,a,delta,h,S11,S12,S22,trace,lower_bound,upper_bound,energy1,energy2,"
        "iters,residual\n";
  return os.str();
}

std::string tensor_csv_row(const std::string& pattern_name, const std::string& kind, double a,
                           std::optional<double> delta, double h, const TensorResult& r) {
  std::ostringstream os;
  os << pattern_name << "," << kind << "," << num(a) << ",";
  if (delta) os << num(*delta);
  os << "," << num(h) << "," << num(r.sigma.s11) << "," << num(r.sigma.s12) << ","
     << num(r.sigma.s22) << "," << num(r.sigma.trace()) << "," << num(1.0) << ","
     << num(1.0 + a * r.pattern_length) << "," << num(r.energy1) << "," << num(r.energy2) << ","
     << r.iterations << "," << num(r.residual) << "\n";
  return os.str();
}

}  // namespace roadnet
