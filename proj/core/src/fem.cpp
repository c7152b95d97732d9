#include "roadnet/fem.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "roadnet/errors.hpp"

namespace roadnet {

DofMap build_dof_map(const PeriodicMesh& mesh) {
  DofMap d;
  d.vertex_to_dof.assign(mesh.n_vertices(), -1);
  std::vector<int> master(mesh.n_vertices(), -1);
  for (auto [s, m] : mesh.periodic_map) master[s] = m;
  int next = 0;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (master[v] < 0) d.vertex_to_dof[v] = next++;
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (master[v] >= 0) {
      if (master[master[v]] >= 0) throw MeshError("periodic map has chained masters");
      d.vertex_to_dof[v] = d.vertex_to_dof[master[v]];
    }
  d.n_dofs = next;
  return d;
}

TriangleGradients triangle_gradients(const PeriodicMesh& mesh, int t) {
  const auto& tr = mesh.triangles[t];
  Vec2 p0 = mesh.vertices[tr[0]], p1 = mesh.vertices[tr[1]], p2 = mesh.vertices[tr[2]];
  TriangleGradients g;
  g.area = 0.5 * cross(p1 - p0, p2 - p0);
  g.grad[0] = left_normal(p2 - p1) / (2.0 * g.area);
  g.grad[1] = left_normal(p0 - p2) / (2.0 * g.area);
  g.grad[2] = left_normal(p1 - p0) / (2.0 * g.area);
  return g;
}

namespace {

void add_bulk(const PeriodicMesh& mesh, const DofMap& dofs, const std::vector<double>& coef,
              std::vector<Triplet>& trip, AssembledSystem& sys, bool coef_load) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    TriangleGradients g = triangle_gradients(mesh, t);
    double s = coef.empty() ? 1.0 : coef[t];
    const auto& tr = mesh.triangles[t];
    int d[3];
    for (int i = 0; i < 3; ++i) d[i] = dofs.vertex_to_dof[tr[i]];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j)
        trip.push_back({d[i], d[j], s * g.area * dot(g.grad[i], g.grad[j])});
      sys.mass[d[i]] += g.area / 3.0;
      if (coef_load) {
        sys.load[0][d[i]] -= s * g.area * g.grad[i].x;
        sys.load[1][d[i]] -= s * g.area * g.grad[i].y;
      }
    }
  }
}

}  // namespace

AssembledSystem assemble_effective(const PeriodicMesh& mesh, double a) {
  if (!(a > 0.0)) throw ParameterError("assemble_effective: a must be positive");
  AssembledSystem sys;
  sys.a = a;
  sys.dofs = build_dof_map(mesh);
  int n = sys.dofs.n_dofs;
  sys.load[0].assign(n, 0.0);
  sys.load[1].assign(n, 0.0);
  sys.mass.assign(n, 0.0);
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_triangles() + 4 * mesh.pattern_edges.size());
  add_bulk(mesh, sys.dofs, {}, trip, sys, false);
  for (const auto& e : mesh.pattern_edges) {
    int da = sys.dofs.vertex_to_dof[e.a], db = sys.dofs.vertex_to_dof[e.b];
    double w = a / e.length;
    trip.push_back({da, da, w});
    trip.push_back({db, db, w});
    trip.push_back({da, db, -w});
    trip.push_back({db, da, -w});
    // load_k at the tail is +a t_k, at the head -a t_k
    sys.load[0][da] += a * e.tangent.x;
    sys.load[0][db] -= a * e.tangent.x;
    sys.load[1][da] += a * e.tangent.y;
    sys.load[1][db] -= a * e.tangent.y;
  }
  sys.matrix = SparseMatrix::from_triplets(n, trip);
  return sys;
}

AssembledSystem assemble_delta(const PeriodicMesh& mesh, double a) {
  if (!(a > 0.0)) throw ParameterError("assemble_delta: a must be positive");
  if (!mesh.delta || mesh.region_tag.empty())
    throw ParameterError("assemble_delta: mesh carries no road strips");
  AssembledSystem sys;
  sys.a = a;
  sys.dofs = build_dof_map(mesh);
  int n = sys.dofs.n_dofs;
  sys.load[0].assign(n, 0.0);
  sys.load[1].assign(n, 0.0);
  sys.mass.assign(n, 0.0);
  std::vector<double> coef(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    coef[t] = mesh.region_tag[t] == 1 ? a / *mesh.delta : 1.0;
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.n_triangles());
  add_bulk(mesh, sys.dofs, coef, trip, sys, true);
  sys.matrix = SparseMatrix::from_triplets(n, trip);
  return sys;
}

CorrectorField solve_corrector(const AssembledSystem& system, int k, const SolveOptions& options) {
  if (k != 1 && k != 2) throw ParameterError("solve_corrector: direction must be 1 or 2");
  int n = system.dofs.n_dofs;
  std::vector<std::vector<double>> kernel{std::vector<double>(n, 1.0)};
  SolveStats stats;
  std::vector<double> u =
      pcg_solve(system.matrix, system.load[k - 1], kernel, options, &stats);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num += system.mass[i] * u[i];
    den += system.mass[i];
  }
  double shift = num / den;
  CorrectorField field;
  field.iterations = stats.iterations;
  field.relative_residual = stats.relative_residual;
  field.values.resize(system.dofs.vertex_to_dof.size());
  for (size_t v = 0; v < field.values.size(); ++v)
    field.values[v] = u[system.dofs.vertex_to_dof[v]] - shift;
  return field;
}

double load_linf(const AssembledSystem& system, int k) {
  if (k != 1 && k != 2) throw ParameterError("load_linf: direction must be 1 or 2");
  double m = 0.0;
  for (double v : system.load[k - 1]) m = std::max(m, std::fabs(v));
  return m;
}

double kirchhoff_residual(const PeriodicMesh& mesh, double a, int k,
                          const std::vector<double>& values) {
  if (k != 1 && k != 2) throw ParameterError("kirchhoff_residual: direction must be 1 or 2");
  DofMap dofs = build_dof_map(mesh);
  std::map<int, std::pair<double, int>> sums;  // dof -> (sum of outgoing slopes, count)
  for (const auto& e : mesh.pattern_edges) {
    int da = dofs.vertex_to_dof[e.a], db = dofs.vertex_to_dof[e.b];
    if (da == db) continue;
    double tk = (k == 1) ? e.tangent.x : e.tangent.y;
    double s = (values[e.b] - values[e.a]) / e.length + tk;
    auto& [sa, ca] = sums[da];
    sa += s;
    ++ca;
    auto& [sb, cb] = sums[db];
    sb -= s;
    ++cb;
  }
  double worst = 0.0;
  for (const auto& [d, sc] : sums)
    if (sc.second >= 3) worst = std::max(worst, a * std::fabs(sc.first));
  return worst;
}

double road_condition_residual(const PeriodicMesh& mesh, double a, int k,
                               const std::vector<double>& values) {
  if (k != 1 && k != 2) throw ParameterError("road_condition_residual: direction must be 1 or 2");
  DofMap dofs = build_dof_map(mesh);
  auto dof = [&](int v) { return dofs.vertex_to_dof[v]; };

  // per-triangle gradients of the corrector
  std::vector<Vec2> grad(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    TriangleGradients g = triangle_gradients(mesh, t);
    const auto& tr = mesh.triangles[t];
    Vec2 gw{0.0, 0.0};
    for (int i = 0; i < 3; ++i) gw = gw + values[tr[i]] * g.grad[i];
    grad[t] = gw;
  }

  // directed triangle sides in dof space; CCW triangles lie left of each side
  std::map<std::pair<int, int>, int> left_of;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) left_of[{dof(tr[i]), dof(tr[(i + 1) % 3])}] = t;
  }

  struct Slope {
    double s;       // tangential slope of w + x_k on the edge
    double jump;    // (grad_left - grad_right) . left_normal(t)
    double length;
  };
  // per vertex dof: incoming and outgoing pattern edges
  std::map<int, std::vector<std::pair<Slope, bool>>> at_vertex;  // bool: vertex is tail
  for (const auto& e : mesh.pattern_edges) {
    int da = dof(e.a), db = dof(e.b);
    if (da == db) continue;
    auto l = left_of.find({da, db});
    auto r = left_of.find({db, da});
    if (l == left_of.end() || r == left_of.end()) continue;
    Slope sl;
    double tk = (k == 1) ? e.tangent.x : e.tangent.y;
    sl.s = (values[e.b] - values[e.a]) / e.length + tk;
    sl.jump = dot(grad[l->second] - grad[r->second], left_normal(e.tangent));
    sl.length = e.length;
    at_vertex[da].push_back({sl, true});
    at_vertex[db].push_back({sl, false});
  }

  double worst = 0.0;
  for (const auto& [d, edges] : at_vertex) {
    if (edges.size() != 2) continue;  // nodes and free ends excluded
    const auto& [s1, tail1] = edges[0];
    const auto& [s2, tail2] = edges[1];
    if (tail1 == tail2) continue;  // not a chain-interior vertex
    const Slope& in = tail1 ? s2 : s1;
    const Slope& out = tail1 ? s1 : s2;
    double ell = 0.5 * (in.length + out.length);
    double u_ss = (out.s - in.s) / ell;
    double jump = 0.5 * (in.jump + out.jump);
    worst = std::max(worst, std::fabs(jump + a * u_ss));
  }
  return worst;
}

}  // namespace roadnet
