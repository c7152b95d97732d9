#include "roadnet/graphspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "roadnet/errors.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/sparse.hpp"

namespace roadnet {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }

  void merge(int i, int j) { parent[find(i)] = find(j); }
};

int end_vertex(const std::vector<std::vector<int>>& vid, PieceEnd e) {
  const auto& v = vid[e.piece];
  return e.end == 0 ? v.front() : v.back();
}

}  // namespace

double PatternGraph::total_length() const {
  double l = 0.0;
  for (const auto& e : edges) l += e.length;
  return l;
}

PatternGraph build_graph(const UnfoldedPattern& unfolded, double h, bool periodic) {
  if (h <= 0.0) throw ParameterError("build_graph: h must be positive");

  std::vector<Vec2> raw_positions;
  std::vector<GraphEdge> raw_edges;
  std::vector<std::vector<int>> vid(unfolded.pieces.size());

  for (size_t pi = 0; pi < unfolded.pieces.size(); ++pi) {
    const auto& piece = unfolded.pieces[pi];
    auto& ids = vid[pi];
    ids.push_back((int)raw_positions.size());
    raw_positions.push_back(piece.points.front());
    for (size_t j = 0; j + 1 < piece.points.size(); ++j) {
      Vec2 p = piece.points[j], q = piece.points[j + 1];
      double len = dist(p, q);
      int parts = std::max(1, (int)std::ceil(len / h - 1e-9));
      for (int s = 1; s <= parts; ++s) {
        int v;
        if (s == parts) {
          bool last = (j + 2 == piece.points.size());
          if (last && piece.closed)
            v = ids.front();
          else {
            v = (int)raw_positions.size();
            raw_positions.push_back(q);
          }
        } else {
          v = (int)raw_positions.size();
          raw_positions.push_back(p + ((double)s / parts) * (q - p));
        }
        raw_edges.push_back({ids.back(), v, len / parts, piece.tangents[j], piece.parent_arc});
        ids.push_back(v);
      }
    }
  }

  UnionFind uf((int)raw_positions.size());
  for (const auto& node : unfolded.node_identifications)
    for (size_t i = 1; i < node.ends.size(); ++i)
      uf.merge(end_vertex(vid, node.ends[0]), end_vertex(vid, node.ends[i]));
  if (periodic)
    for (const auto& bid : unfolded.boundary_identifications)
      uf.merge(end_vertex(vid, bid.a), end_vertex(vid, bid.b));

  // Compact to final vertex ids, keeping first-seen order.
  std::vector<int> final_id(raw_positions.size(), -1);
  PatternGraph g;
  g.periodic = periodic;
  for (int i = 0; i < (int)raw_positions.size(); ++i) {
    int root = uf.find(i);
    if (final_id[root] < 0) {
      final_id[root] = (int)g.positions.size();
      g.positions.push_back(raw_positions[root]);
    }
    final_id[i] = final_id[root];
  }
  for (auto e : raw_edges) {
    e.a = final_id[e.a];
    e.b = final_id[e.b];
    g.edges.push_back(e);
  }

  // Connected components over the final graph.
  UnionFind comp(g.n_vertices());
  for (const auto& e : g.edges) comp.merge(e.a, e.b);
  g.component.assign(g.n_vertices(), -1);
  for (int i = 0; i < g.n_vertices(); ++i) {
    int root = comp.find(i);
    if (g.component[root] < 0) g.component[root] = g.n_components++;
    g.component[i] = g.component[root];
  }
  return g;
}

int kernel_dim(const PatternGraph& graph) { return graph.n_components; }

double poincare_ratio(const PatternGraph& graph, const GraphFunction& u) {
  if ((int)u.size() != graph.n_vertices())
    throw ParameterError("poincare_ratio: function size does not match graph");
  if (graph.n_components != 1) throw ParameterError("poincare_ratio: graph is not connected");
  double l = 0.0, integral = 0.0, seminorm2 = 0.0;
  for (const auto& e : graph.edges) {
    l += e.length;
    integral += 0.5 * e.length * (u[e.a] + u[e.b]);
    double du = u[e.b] - u[e.a];
    seminorm2 += du * du / e.length;
  }
  if (seminorm2 <= 0.0) throw ParameterError("poincare_ratio: seminorm of u is zero");
  double mean = integral / l;
  double norm2 = 0.0;
  for (const auto& e : graph.edges) {
    double va = u[e.a] - mean, vb = u[e.b] - mean;
    norm2 += e.length / 3.0 * (va * va + va * vb + vb * vb);
  }
  return norm2 / (l * l * seminorm2);
}

namespace {

// min over u of sum_e L_e (T_k - du/L_e)^2 = c - b.u with (graph
// Laplacian) u = b, weights 1/L_e; constants per component are deflated.
double dk_squared(const PatternGraph& g, int k) {
  int n = g.n_vertices();
  if (n == 0 || g.edges.empty()) return 0.0;

  double c = 0.0;
  std::vector<double> b(n, 0.0);
  std::vector<Triplet> triplets;
  for (const auto& e : g.edges) {
    double tk = (k == 1) ? e.tangent.x : e.tangent.y;
    c += tk * tk * e.length;
    if (e.a == e.b) continue;  // loop shorter than h: no gradient freedom
    b[e.b] += tk;
    b[e.a] -= tk;
    double w = 1.0 / e.length;
    triplets.push_back({e.a, e.a, w});
    triplets.push_back({e.b, e.b, w});
    triplets.push_back({e.a, e.b, -w});
    triplets.push_back({e.b, e.a, -w});
  }
  if (triplets.empty()) return std::max(0.0, c);

  auto A = SparseMatrix::from_triplets(n, triplets);
  std::vector<std::vector<double>> kernel;
  for (int comp = 0; comp < g.n_components; ++comp) {
    std::vector<double> ind(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (g.component[i] == comp) ind[i] = 1.0;
    kernel.push_back(std::move(ind));
  }
  SolveOptions opt;
  opt.rtol = 1e-12;
  auto u = pcg_solve(A, b, kernel, opt);
  // Evaluate the objective at the minimizer as a sum of squares; the
  // equivalent c - b.u form cancels catastrophically when d is near zero.
  double obj = 0.0;
  for (const auto& e : g.edges) {
    double tk = (k == 1) ? e.tangent.x : e.tangent.y;
    double du = (e.a == e.b) ? 0.0 : u[e.b] - u[e.a];
    double defect = tk - du / e.length;
    obj += defect * defect * e.length;
  }
  return obj;
}

}  // namespace

double compute_dk(const UnfoldedPattern& unfolded, int k, double h) {
  if (k != 1 && k != 2) throw ParameterError("compute_dk: k must be 1 or 2");
  auto g = build_graph(unfolded, h, true);
  return std::sqrt(dk_squared(g, k));
}

namespace {

void add_feature(std::vector<double>& xs, double v) { xs.push_back(wrap01(v)); }

// Coordinates where the moving cell boundary meets an arc endpoint, node, or
// axis-tangency point; identification topology can only change there.
void collect_features(const TorusPattern& pattern, std::vector<double>& xs,
                      std::vector<double>& ys) {
  for (const auto& arc : pattern.arcs()) {
    if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
      add_feature(xs, s->p.x);
      add_feature(xs, s->q.x);
      add_feature(ys, s->p.y);
      add_feature(ys, s->q.y);
    } else if (const auto* c = std::get_if<CircleSpec>(&arc)) {
      add_feature(xs, c->center.x - c->radius);
      add_feature(xs, c->center.x + c->radius);
      add_feature(ys, c->center.y - c->radius);
      add_feature(ys, c->center.y + c->radius);
    } else if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
      double t0 = std::min(a->theta0, a->theta1), t1 = std::max(a->theta0, a->theta1);
      for (double t : {a->theta0, a->theta1}) {
        add_feature(xs, a->center.x + a->radius * std::cos(t));
        add_feature(ys, a->center.y + a->radius * std::sin(t));
      }
      constexpr double half_pi = std::numbers::pi / 2.0;
      for (int q = (int)std::ceil(t0 / half_pi); q * half_pi <= t1; ++q) {
        switch (((q % 4) + 4) % 4) {
          case 0: add_feature(xs, a->center.x + a->radius); break;
          case 1: add_feature(ys, a->center.y + a->radius); break;
          case 2: add_feature(xs, a->center.x - a->radius); break;
          case 3: add_feature(ys, a->center.y - a->radius); break;
        }
      }
    } else {
      for (const auto& p : std::get<PolylineSpec>(arc).points) {
        add_feature(xs, p.x);
        add_feature(ys, p.y);
      }
    }
  }
}

std::vector<double> midpoints(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
           xs.end());
  std::vector<double> mids;
  for (size_t i = 0; i + 1 < xs.size(); ++i) mids.push_back(0.5 * (xs[i] + xs[i + 1]));
  if (!xs.empty()) mids.push_back(wrap01(0.5 * (xs.back() + xs.front() + 1.0)));
  return mids;
}

}  // namespace

DReport compute_d(const TorusPattern& pattern, int grid_n, double h) {
  if (grid_n < 1) throw ParameterError("compute_d: grid_n must be >= 1");

  std::vector<Vec2> offsets;
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j)
      offsets.push_back({(double)i / grid_n, (double)j / grid_n});
  std::vector<double> fx, fy;
  collect_features(pattern, fx, fy);
  for (double x : midpoints(fx))
    for (double y : midpoints(fy)) offsets.push_back({x, y});

  DReport report;
  report.table.resize(offsets.size());
  parallel_for(offsets.size(), [&](size_t i) {
    auto unfolded = unfold(pattern, offsets[i], h);
    auto g = build_graph(unfolded, h, true);
    OffsetSample s;
    s.offset = offsets[i];
    s.d1sq = dk_squared(g, 1);
    s.d2sq = dk_squared(g, 2);
    s.components = g.n_components;
    report.table[i] = s;
  });

  double best = -1.0;
  for (const auto& s : report.table) {
    if (s.sum() > best) {
      best = s.sum();
      report.argmax_offset = s.offset;
    }
  }
  report.d = std::sqrt(std::max(0.0, best));
  return report;
}

}  // namespace roadnet
