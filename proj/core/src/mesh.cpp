#include "roadnet/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "roadnet/delaunay.hpp"
#include "roadnet/errors.hpp"

namespace roadnet {

double PeriodicMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
}

namespace {

constexpr double kTol = 1e-12;

Vec2 snap_boundary(Vec2 p) {
  if (std::fabs(p.x) < kTol) p.x = 0.0;
  if (std::fabs(p.x - 1.0) < kTol) p.x = 1.0;
  if (std::fabs(p.y) < kTol) p.y = 0.0;
  if (std::fabs(p.y - 1.0) < kTol) p.y = 1.0;
  return p;
}

struct MeshChain {
  std::vector<Vec2> points;
  std::vector<Vec2> tangents;  // one per chord; empty for strip chains
  int parent_arc = -1;
  bool closed = false;
  bool on_pattern = false;
};

// Left offset of a polyline at distance delta with mitred corners. For
// closed chains (front == back bitwise) the seam is mitred like any corner.
std::vector<Vec2> offset_left(const std::vector<Vec2>& pts, bool closed, double delta,
                              int parent) {
  size_t nseg = pts.size() - 1;
  std::vector<Vec2> tans(nseg);
  for (size_t i = 0; i < nseg; ++i) tans[i] = normalized(pts[i + 1] - pts[i]);
  std::vector<Vec2> out(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    Vec2 t_in, t_out;
    if (closed) {
      size_t iv = i % nseg;
      t_in = tans[(iv + nseg - 1) % nseg];
      t_out = tans[iv];
    } else {
      t_in = (i == 0) ? tans[0] : tans[i - 1];
      t_out = (i == nseg) ? tans[nseg - 1] : tans[i];
    }
    Vec2 m = left_normal(t_in) + left_normal(t_out);
    double len = norm(m);
    if (len < 1e-9)
      throw GeometryError("strip of arc " + std::to_string(parent) + " folds back on itself");
    m = m / len;
    double scale = dot(m, left_normal(t_out));
    if (scale < 0.1)
      throw GeometryError("strip corner on arc " + std::to_string(parent) +
                          " is too sharp for the requested width");
    out[i] = pts[i] + (delta / scale) * m;
  }
  return out;
}

// Clip a chain (translated to window coordinates) and its lattice copies to
// the unit cell, producing contiguous sub-chains; copies lying on the far
// boundary duplicate near-boundary ones and are dropped.
void clip_chain(const std::vector<Vec2>& pts, const std::vector<Vec2>* tans, bool closed,
                int parent, bool on_pattern, std::vector<MeshChain>& out) {
  double x0 = pts[0].x, x1 = pts[0].x, y0 = pts[0].y, y1 = pts[0].y;
  for (Vec2 p : pts) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  int sx0 = (int)std::ceil(-x1 - kTol), sx1 = (int)std::floor(1.0 - x0 + kTol);
  int sy0 = (int)std::ceil(-y1 - kTol), sy1 = (int)std::floor(1.0 - y0 + kTol);
  size_t nseg = pts.size() - 1;

  for (int sx = sx0; sx <= sx1; ++sx) {
    for (int sy = sy0; sy <= sy1; ++sy) {
      Vec2 shift{(double)sx, (double)sy};
      std::vector<Vec2> sp(pts.size());
      for (size_t i = 0; i < pts.size(); ++i) sp[i] = snap_boundary(pts[i] + shift);

      bool seam_inside = closed;
      size_t start = 0;
      if (closed) {
        for (size_t i = 0; i < sp.size(); ++i) {
          if (sp[i].x < -kTol || sp[i].x > 1.0 + kTol || sp[i].y < -kTol || sp[i].y > 1.0 + kTol) {
            seam_inside = false;
            start = i;
            break;
          }
        }
      }

      MeshChain chain;
      auto flush = [&]() {
        bool far = !chain.points.empty();
        bool far_x = true, far_y = true;
        for (Vec2 p : chain.points) {
          if (p.x != 1.0) far_x = false;
          if (p.y != 1.0) far_y = false;
        }
        far = far && (far_x || far_y);
        double len = 0.0;
        for (size_t i = 0; i + 1 < chain.points.size(); ++i)
          len += dist(chain.points[i], chain.points[i + 1]);
        if (chain.points.size() >= 2 && len > kTol && !far) {
          chain.parent_arc = parent;
          chain.on_pattern = on_pattern;
          out.push_back(chain);
        }
        chain = MeshChain{};
      };

      for (size_t k = 0; k < nseg; ++k) {
        size_t i = (start + k) % nseg;
        Vec2 p = sp[i], q = sp[i + 1];
        Vec2 c0 = p, c1 = q;
        if (!clip_segment_to_cell(c0, c1)) {
          flush();
          continue;
        }
        c0 = snap_boundary(c0);
        c1 = snap_boundary(c1);
        if (chain.points.empty()) {
          chain.points.push_back(c0);
        } else if (dist(chain.points.back(), c0) > kTol) {
          flush();
          chain.points.push_back(c0);
        }
        chain.points.push_back(c1);
        if (tans) chain.tangents.push_back((*tans)[i]);
        if (c1.x != q.x || c1.y != q.y) flush();
      }
      // closed only if every segment survived uncut; any flush or clip broke the loop
      if (seam_inside && chain.points.size() == sp.size()) chain.closed = true;
      flush();
    }
  }
}

double tri_min_angle(Vec2 a, Vec2 b, Vec2 c) {
  double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
  auto angle = [](double opp, double e1, double e2) {
    double cosv = (e1 * e1 + e2 * e2 - opp * opp) / (2.0 * e1 * e2);
    return std::acos(std::clamp(cosv, -1.0, 1.0));
  };
  double m = std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
  return m * 180.0 / std::numbers::pi;
}

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * cross(ab, ac);
  double ab2 = norm2(ab), ac2 = norm2(ac);
  return {a.x + (ac.y * ab2 - ab.y * ac2) / d, a.y + (ab.x * ac2 - ac.x * ab2) / d};
}

bool chords_cross(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  const double endpoint_tol = 1e-9;
  if (dist(p1, p2) < endpoint_tol || dist(p1, q2) < endpoint_tol ||
      dist(q1, p2) < endpoint_tol || dist(q1, q2) < endpoint_tol)
    return false;
  auto side = [](Vec2 a, Vec2 b, Vec2 c) {
    double d = cross(b - a, c - a);
    if (std::fabs(d) <= 1e-12) return 0;
    return d > 0.0 ? 1 : -1;
  };
  int d1 = side(p1, q1, p2), d2 = side(p1, q1, q2);
  int d3 = side(p2, q2, p1), d4 = side(p2, q2, q1);
  return d1 * d2 < 0 && d3 * d4 < 0;
}

bool odd_parity(Vec2 p, const std::vector<std::vector<Vec2>>& loops) {
  bool in = false;
  for (const auto& loop : loops) {
    for (size_t i = 0; i + 1 < loop.size(); ++i) {
      Vec2 a = loop[i], b = loop[i + 1];
      if ((a.y > p.y) != (b.y > p.y)) {
        double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x > p.x) in = !in;
      }
    }
  }
  return in;
}

}  // namespace

PeriodicMesh build_mesh(const UnfoldedPattern& unfolded, double h, std::optional<double> delta,
                        double quality_floor_deg) {
  if (!(h > 0.0) || h > 1.0) throw ParameterError("build_mesh: h must lie in (0, 1]");
  if (delta && !(*delta > 0.0)) throw ParameterError("build_mesh: delta must be positive");
  double h_strip = delta ? std::min(h, *delta / 2.0) : h;

  // Constraint chains: clipped pattern pieces, plus clipped strip offset
  // curves and end caps when delta is requested.
  std::vector<MeshChain> chains;
  for (const auto& piece : unfolded.pieces) {
    MeshChain c;
    c.points = piece.points;
    for (Vec2& p : c.points) p = snap_boundary(p);
    c.tangents = piece.tangents;
    c.parent_arc = piece.parent_arc;
    c.closed = piece.closed;
    c.on_pattern = true;
    chains.push_back(std::move(c));
  }

  std::vector<std::pair<int, std::vector<std::vector<Vec2>>>> strip_loops;  // per arc copies
  if (delta) {
    for (const auto& src : unfolded.source_chains) {
      auto off = offset_left(src.points, src.closed, *delta, src.parent_arc);
      clip_chain(off, nullptr, src.closed, src.parent_arc, false, chains);
      if (h_strip < h) {
        // Strip narrower than the bulk size: without a midline row the strip
        // interior has no vertices and every triangle there spans the full
        // width, so the quality floor becomes unreachable.
        auto mid = offset_left(src.points, src.closed, *delta / 2.0, src.parent_arc);
        clip_chain(mid, nullptr, src.closed, src.parent_arc, false, chains);
      }
      std::vector<Vec2> contour;
      if (src.closed) {
        // annulus between the chain and its offset: two loops, odd parity
        // inside exactly one of them
        contour = src.points;
      } else {
        std::vector<Vec2> cap_start{src.points.front(), off.front()};
        std::vector<Vec2> cap_end{src.points.back(), off.back()};
        clip_chain(cap_start, nullptr, false, src.parent_arc, false, chains);
        clip_chain(cap_end, nullptr, false, src.parent_arc, false, chains);
        contour = src.points;
        for (auto it = off.rbegin(); it != off.rend(); ++it) contour.push_back(*it);
        contour.push_back(src.points.front());
      }

      // lattice copies of the tagging loops covering the cell
      std::vector<std::vector<Vec2>> base_loops;
      if (src.closed) {
        base_loops.push_back(src.points);
        base_loops.push_back(off);
      } else {
        base_loops.push_back(contour);
      }
      double x0 = 1e30, x1 = -1e30, y0 = 1e30, y1 = -1e30;
      for (const auto& loop : base_loops)
        for (Vec2 p : loop) {
          x0 = std::min(x0, p.x);
          x1 = std::max(x1, p.x);
          y0 = std::min(y0, p.y);
          y1 = std::max(y1, p.y);
        }
      std::vector<std::vector<Vec2>> copies;
      for (int sx = (int)std::ceil(-x1 - kTol); sx <= (int)std::floor(1.0 - x0 + kTol); ++sx)
        for (int sy = (int)std::ceil(-y1 - kTol); sy <= (int)std::floor(1.0 - y0 + kTol); ++sy)
          for (const auto& loop : base_loops) {
            std::vector<Vec2> copy(loop.size());
            for (size_t i = 0; i < loop.size(); ++i)
              copy[i] = loop[i] + Vec2{(double)sx, (double)sy};
            copies.push_back(std::move(copy));
          }
      strip_loops.push_back({src.parent_arc, std::move(copies)});
    }
  }

  // Unify coincident chain endpoints (pattern nodes and periodic cuts): each
  // group takes one canonical position, other members differ from it by an
  // exact integer lattice vector.
  {
    struct EndRef {
      int chain;
      int end;
    };
    std::vector<EndRef> refs;
    auto end_pos = [&](EndRef r) -> Vec2& {
      auto& pts = chains[r.chain].points;
      return r.end == 0 ? pts.front() : pts.back();
    };
    for (int c = 0; c < (int)chains.size(); ++c) {
      if (chains[c].closed) continue;
      refs.push_back({c, 0});
      refs.push_back({c, 1});
    }
    int n = (int)refs.size();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (torus_dist(end_pos(refs[i]), end_pos(refs[j])) < kNodeSnapTol)
          parent[find(i)] = find(j);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (auto& [root, members] : groups) {
      if (members.size() < 2) continue;
      Vec2 canon = end_pos(refs[members[0]]);
      for (int m : members) {
        Vec2 p = end_pos(refs[m]);
        if (p.x < canon.x - kTol || (std::fabs(p.x - canon.x) <= kTol && p.y < canon.y))
          canon = p;
      }
      for (int m : members) {
        Vec2 p = end_pos(refs[m]);
        Vec2 lat{std::round(p.x - canon.x), std::round(p.y - canon.y)};
        end_pos(refs[m]) = canon + lat;
      }
    }
  }

  // Collect raw chords (for rejection tests and the crossing pre-check).
  struct Chord {
    Vec2 p, q;
    int parent;
    bool on_pattern;
  };
  std::vector<Chord> chords;
  for (const auto& c : chains)
    for (size_t i = 0; i + 1 < c.points.size(); ++i)
      chords.push_back({c.points[i], c.points[i + 1], c.parent_arc, c.on_pattern});

  if (delta) {
    for (size_t i = 0; i < chords.size(); ++i) {
      for (size_t j = i + 1; j < chords.size(); ++j) {
        if (chords[i].on_pattern && chords[j].on_pattern) continue;  // already validated
        if (chords_cross(chords[i].p, chords[i].q, chords[j].p, chords[j].q)) {
          std::ostringstream os;
          os << "strip of arc " << (chords[i].on_pattern ? chords[j].parent : chords[i].parent)
             << " intersects arc " << (chords[i].on_pattern ? chords[i].parent : chords[j].parent)
             << "; reduce delta";
          throw GeometryError(os.str());
        }
      }
    }
  }

  auto clear_of_chords = [&](Vec2 p, double r) {
    for (const auto& ch : chords) {
      if (std::min(ch.p.x, ch.q.x) - r > p.x || std::max(ch.p.x, ch.q.x) + r < p.x ||
          std::min(ch.p.y, ch.q.y) - r > p.y || std::max(ch.p.y, ch.q.y) + r < p.y)
        continue;
      if (dist_point_segment(p, ch.p, ch.q) < r) return false;
    }
    return true;
  };

  Triangulator tri;

  // Constraint chain vertices, subdivided to the local target size.
  struct EdgeRec {
    int a, b;
    Vec2 tangent;
    int parent;
  };
  std::vector<std::vector<int>> chain_ids(chains.size());
  std::vector<EdgeRec> pattern_edge_recs;
  for (size_t ci = 0; ci < chains.size(); ++ci) {
    const auto& c = chains[ci];
    double target = c.on_pattern ? (delta ? h_strip : h) : h_strip;
    auto& ids = chain_ids[ci];
    ids.push_back(tri.insert(c.points.front()));
    for (size_t j = 0; j + 1 < c.points.size(); ++j) {
      Vec2 p = c.points[j], q = c.points[j + 1];
      double len = dist(p, q);
      int parts = std::max(1, (int)std::ceil(len / target - 1e-9));
      for (int s = 1; s <= parts; ++s) {
        Vec2 pos = (s == parts) ? q : p + ((double)s / parts) * (q - p);
        int id = tri.insert(snap_boundary(pos));
        if (c.on_pattern && id != ids.back())
          pattern_edge_recs.push_back({ids.back(), id, c.tangents[j], c.parent_arc});
        ids.push_back(id);
      }
    }
  }

  // Filler points: mirrored boundary distributions, then an aligned interior
  // grid, both kept clear of the constraint chains.
  int n = std::max(1, (int)std::round(1.0 / h));
  double r_edge = 0.45 * h;
  for (int i = 1; i < n; ++i) {
    double x = (double)i / n;
    if (clear_of_chords({x, 0.0}, r_edge) && clear_of_chords({x, 1.0}, r_edge)) {
      tri.insert({x, 0.0});
      tri.insert({x, 1.0});
    }
    if (clear_of_chords({0.0, x}, r_edge) && clear_of_chords({1.0, x}, r_edge)) {
      tri.insert({0.0, x});
      tri.insert({1.0, x});
    }
  }
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      Vec2 p{(double)i / n, (double)j / n};
      if (clear_of_chords(p, r_edge)) tri.insert(p);
    }

  // Graded bands: when strips force a local size below h, surround the
  // chains with grids of intermediate spacing so each Delaunay layer jumps
  // at most 2:1 in size; circumcenter polishing cannot bridge a 4:1 gap.
  // Rings overlap and the lattices nest, so overlaps dedupe to the finer
  // spacing; a thin ring would leave gaps along curved chains.
  for (double s = h / 2.0; s > 0.95 * h_strip; s /= 2.0) {
    int ns = std::max(1, (int)std::round(1.0 / s));
    double margin = 0.45 * s;
    for (int i = 1; i < ns; ++i)
      for (int j = 1; j < ns; ++j) {
        Vec2 p{(double)i / ns, (double)j / ns};
        if (p.x < margin || p.x > 1.0 - margin || p.y < margin || p.y > 1.0 - margin) continue;
        if (!clear_of_chords(p, 0.6 * s) || clear_of_chords(p, 2.4 * s)) continue;
        tri.insert(p);
      }
    // Continue the grading onto the cell edges with mirrored pairs wherever
    // a chain runs close to the boundary.
    for (int j = 1; j < ns; ++j) {
      double t = (double)j / ns;
      Vec2 p0{0.0, t}, p1{1.0, t};
      if (clear_of_chords(p0, 0.6 * s) && clear_of_chords(p1, 0.6 * s) &&
          (!clear_of_chords(p0, 2.4 * s) || !clear_of_chords(p1, 2.4 * s))) {
        tri.insert(p0);
        tri.insert(p1);
      }
      Vec2 q0{t, 0.0}, q1{t, 1.0};
      if (clear_of_chords(q0, 0.6 * s) && clear_of_chords(q1, 0.6 * s) &&
          (!clear_of_chords(q0, 2.4 * s) || !clear_of_chords(q1, 2.4 * s))) {
        tri.insert(q0);
        tri.insert(q1);
      }
    }
  }

  // Constrained edges.
  for (size_t ci = 0; ci < chains.size(); ++ci) {
    const auto& ids = chain_ids[ci];
    for (size_t k = 0; k + 1 < ids.size(); ++k)
      if (ids[k] != ids[k + 1] && ids[k] >= 0 && ids[k + 1] >= 0)
        tri.insert_constraint(ids[k], ids[k + 1]);
  }

  // Boundary twin closure: every vertex on the cell boundary must have its
  // periodic partner present so the boundary traces match.
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    std::map<std::pair<double, double>, int> pos_map;
    const auto& pts = tri.points();
    for (int i = 0; i < (int)pts.size(); ++i) pos_map[{pts[i].x, pts[i].y}] = i;
    std::vector<Vec2> missing;
    for (int i = 0; i < (int)pts.size(); ++i) {
      Vec2 p = pts[i];
      bool bx = p.x == 0.0 || p.x == 1.0;
      bool by = p.y == 0.0 || p.y == 1.0;
      if (!bx && !by) continue;
      std::vector<Vec2> twins;
      if (bx) twins.push_back({1.0 - p.x, p.y});
      if (by) twins.push_back({p.x, 1.0 - p.y});
      if (bx && by) twins.push_back({1.0 - p.x, 1.0 - p.y});
      for (Vec2 t : twins)
        if (!pos_map.count({t.x, t.y})) missing.push_back(t);
    }
    for (Vec2 t : missing) {
      if (tri.insert(t) >= 0) changed = true;
    }
    if (!changed) break;
  }

  tri.make_delaunay();

  // Quality: Delaunay flips first, then a few rounds of circumcenter
  // insertion away from constraints and the cell boundary.
  double floor_deg = quality_floor_deg;
  size_t prev_bad = (size_t)-1;
  for (int round = 0; round < 12; ++round) {
    auto trs = tri.triangles();
    const auto& pts = tri.points();
    std::vector<Vec2> centers;
    size_t bad = 0;
    for (const auto& t : trs) {
      if (tri_min_angle(pts[t[0]], pts[t[1]], pts[t[2]]) < floor_deg) {
        ++bad;
        Vec2 c = circumcenter(pts[t[0]], pts[t[1]], pts[t[2]]);
        double m = 0.3 * h;
        if (c.x < m || c.x > 1.0 - m || c.y < m || c.y > 1.0 - m) continue;
        if (!clear_of_chords(c, 0.45 * h_strip)) continue;
        centers.push_back(c);
      }
    }
    if (std::getenv("ROADNET_MESH_DEBUG"))
      std::fprintf(stderr, "quality round %d: %zu bad, %zu insertable, %zu pts\n", round, bad,
                   centers.size(), pts.size());
    if (centers.empty()) break;
    if (bad >= prev_bad) break;  // not converging; stop before insertion blows up
    prev_bad = bad;
    bool inserted = false;
    for (Vec2 c : centers)
      if (tri.insert(c) >= 0) inserted = true;
    if (!inserted) break;
    tri.make_delaunay();
  }

  PeriodicMesh mesh;
  mesh.h = h;
  mesh.delta = delta;
  mesh.vertices = tri.points();
  mesh.triangles = tri.triangles();

  {
    double worst = 180.0;
    for (const auto& t : mesh.triangles)
      worst = std::min(worst, tri_min_angle(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                            mesh.vertices[t[2]]));
    if (worst < quality_floor_deg) {
      std::ostringstream os;
      os << "mesh quality floor " << quality_floor_deg << " deg not reached (min angle " << worst
         << " deg)";
      throw MeshError(os.str());
    }
  }

  for (const auto& rec : pattern_edge_recs) {
    if (rec.a == rec.b) continue;
    PatternMeshEdge e;
    e.a = rec.a;
    e.b = rec.b;
    e.tangent = rec.tangent;
    e.parent_arc = rec.parent;
    e.length = dist(mesh.vertices[rec.a], mesh.vertices[rec.b]);
    mesh.pattern_edges.push_back(e);
  }

  {
    std::map<std::pair<double, double>, int> pos_map;
    for (int i = 0; i < (int)mesh.vertices.size(); ++i)
      pos_map[{mesh.vertices[i].x, mesh.vertices[i].y}] = i;
    for (int i = 0; i < (int)mesh.vertices.size(); ++i) {
      Vec2 p = mesh.vertices[i];
      bool sx = p.x == 1.0, sy = p.y == 1.0;
      if (!sx && !sy) continue;
      Vec2 target{sx ? 0.0 : p.x, sy ? 0.0 : p.y};
      auto it = pos_map.find({target.x, target.y});
      if (it == pos_map.end()) throw MeshError("periodic boundary vertex has no partner");
      mesh.periodic_map.push_back({i, it->second});
    }
  }

  if (delta) {
    mesh.region_tag.assign(mesh.triangles.size(), 0);
    for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
      const auto& tr = mesh.triangles[t];
      Vec2 c = (mesh.vertices[tr[0]] + mesh.vertices[tr[1]] + mesh.vertices[tr[2]]) / 3.0;
      for (const auto& [arc, loops] : strip_loops) {
        if (odd_parity(c, loops)) {
          mesh.region_tag[t] = 1;
          break;
        }
      }
    }
  }

  for (int t = 0; t < (int)mesh.triangles.size(); ++t)
    if (mesh.triangle_area(t) <= 0.0) throw MeshError("degenerate triangle in mesh");

  return mesh;
}

PeriodicMesh refine(const PeriodicMesh& mesh) {
  PeriodicMesh out;
  out.h = mesh.h / 2.0;
  out.delta = mesh.delta;
  out.vertices = mesh.vertices;
  out.periodic_map = mesh.periodic_map;

  std::map<std::pair<double, double>, int> pos_map;
  for (int i = 0; i < (int)mesh.vertices.size(); ++i)
    pos_map[{mesh.vertices[i].x, mesh.vertices[i].y}] = i;

  auto key = [](int u, int v) { return std::make_pair(std::min(u, v), std::max(u, v)); };
  std::map<std::pair<int, int>, int> mid;

  auto on_right = [&](int v) { return mesh.vertices[v].x == 1.0; };
  auto on_top = [&](int v) { return mesh.vertices[v].y == 1.0; };

  // First create midpoints of edges that are their own masters, then the
  // boundary slave edges, whose midpoints copy the master midpoint shifted
  // by the exact lattice vector.
  std::vector<std::pair<int, int>> slave_edges;
  auto add_plain = [&](int u, int v) {
    auto k = key(u, v);
    if (mid.count(k)) return;
    if ((on_right(u) && on_right(v)) || (on_top(u) && on_top(v))) {
      slave_edges.push_back(k);
      return;
    }
    Vec2 m = 0.5 * (mesh.vertices[u] + mesh.vertices[v]);
    m = snap_boundary(m);
    mid[k] = (int)out.vertices.size();
    out.vertices.push_back(m);
  };
  for (const auto& t : mesh.triangles) {
    add_plain(t[0], t[1]);
    add_plain(t[1], t[2]);
    add_plain(t[2], t[0]);
  }
  for (auto [u, v] : slave_edges) {
    auto k = key(u, v);
    if (mid.count(k)) continue;
    bool right = on_right(u) && on_right(v);
    Vec2 lattice = right ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    Vec2 mu = mesh.vertices[u] - lattice, mv = mesh.vertices[v] - lattice;
    auto iu = pos_map.find({mu.x, mu.y});
    auto iv = pos_map.find({mv.x, mv.y});
    if (iu == pos_map.end() || iv == pos_map.end())
      throw MeshError("refine: slave edge has no master edge");
    auto mk = key(iu->second, iv->second);
    auto im = mid.find(mk);
    if (im == mid.end()) throw MeshError("refine: master edge midpoint missing");
    Vec2 mpos = out.vertices[im->second] + lattice;
    mid[k] = (int)out.vertices.size();
    out.vertices.push_back(mpos);
    out.periodic_map.push_back({mid[k], im->second});
  }

  for (int t = 0; t < (int)mesh.triangles.size(); ++t) {
    auto [a, b, c] = mesh.triangles[t];
    int mab = mid.at(key(a, b)), mbc = mid.at(key(b, c)), mca = mid.at(key(c, a));
    out.triangles.push_back({a, mab, mca});
    out.triangles.push_back({b, mbc, mab});
    out.triangles.push_back({c, mca, mbc});
    out.triangles.push_back({mab, mbc, mca});
    if (!mesh.region_tag.empty())
      for (int r = 0; r < 4; ++r) out.region_tag.push_back(mesh.region_tag[t]);
  }

  for (const auto& e : mesh.pattern_edges) {
    int m = mid.at(key(e.a, e.b));
    PatternMeshEdge e1 = e, e2 = e;
    e1.b = m;
    e1.length = dist(out.vertices[e.a], out.vertices[m]);
    e2.a = m;
    e2.length = dist(out.vertices[m], out.vertices[e.b]);
    out.pattern_edges.push_back(e1);
    out.pattern_edges.push_back(e2);
  }
  return out;
}

QualityReport quality_report(const PeriodicMesh& mesh) {
  QualityReport q;
  q.n_vertices = mesh.n_vertices();
  q.n_triangles = mesh.n_triangles();
  q.n_pattern_edges = (int)mesh.pattern_edges.size();
  q.min_angle_deg = 180.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tr = mesh.triangles[t];
    Vec2 a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
    q.min_angle_deg = std::min(q.min_angle_deg, tri_min_angle(a, b, c));
    double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    q.max_aspect = std::max(q.max_aspect, std::max({la, lb, lc}) / std::min({la, lb, lc}));
    double area = mesh.triangle_area(t);
    q.total_area += area;
    if (!mesh.region_tag.empty() && mesh.region_tag[t] == 1) q.road_area += area;
  }
  if (mesh.n_triangles() == 0) q.min_angle_deg = 0.0;
  return q;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string dump_mesh(const PeriodicMesh& mesh,
                      const std::vector<std::pair<std::string, std::vector<double>>>& fields) {
  std::ostringstream os;
  os << "ROADNET_MESH 1\n";
  os << "h " << fmt(mesh.h) << "\n";
  os << "delta " << (mesh.delta ? fmt(*mesh.delta) : std::string("none")) << "\n";
  os << "VERTICES " << mesh.n_vertices() << "\n";
  for (Vec2 p : mesh.vertices) os << fmt(p.x) << " " << fmt(p.y) << "\n";
  os << "TRIANGLES " << mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "PATTERN_EDGES " << mesh.pattern_edges.size() << "\n";
  for (const auto& e : mesh.pattern_edges)
    os << e.a << " " << e.b << " " << fmt(e.tangent.x) << " " << fmt(e.tangent.y) << " "
       << e.parent_arc << " " << fmt(e.length) << "\n";
  os << "PERIODIC_MAP " << mesh.periodic_map.size() << "\n";
  for (auto [s, m] : mesh.periodic_map) os << s << " " << m << "\n";
  if (!mesh.region_tag.empty()) {
    os << "TAGS " << mesh.region_tag.size() << "\n";
    for (int t : mesh.region_tag) os << t << "\n";
  }
  for (const auto& [name, values] : fields) {
    os << "FIELD " << name << " " << values.size() << "\n";
    for (double v : values) os << fmt(v) << "\n";
  }
  return os.str();
}

MeshDump parse_mesh_dump(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  if (!(in >> tok) || tok != "ROADNET_MESH") throw ParseError("mesh dump: bad magic");
  int version;
  if (!(in >> version) || version != 1) throw ParseError("mesh dump: unsupported version");
  MeshDump dump;
  auto& mesh = dump.mesh;
  if (!(in >> tok) || tok != "h" || !(in >> mesh.h)) throw ParseError("mesh dump: missing h");
  if (!(in >> tok) || tok != "delta") throw ParseError("mesh dump: missing delta");
  std::string dval;
  in >> dval;
  if (dval != "none") mesh.delta = std::stod(dval);
  while (in >> tok) {
    if (tok == "VERTICES") {
      int count;
      in >> count;
      mesh.vertices.resize(count);
      for (auto& p : mesh.vertices)
        if (!(in >> p.x >> p.y)) throw ParseError("mesh dump: truncated VERTICES");
    } else if (tok == "TRIANGLES") {
      int count;
      in >> count;
      mesh.triangles.resize(count);
      for (auto& t : mesh.triangles)
        if (!(in >> t[0] >> t[1] >> t[2])) throw ParseError("mesh dump: truncated TRIANGLES");
    } else if (tok == "PATTERN_EDGES") {
      int count;
      in >> count;
      mesh.pattern_edges.resize(count);
      for (auto& e : mesh.pattern_edges)
        if (!(in >> e.a >> e.b >> e.tangent.x >> e.tangent.y >> e.parent_arc >> e.length))
          throw ParseError("mesh dump: truncated PATTERN_EDGES");
    } else if (tok == "PERIODIC_MAP") {
      int count;
      in >> count;
      mesh.periodic_map.resize(count);
      for (auto& pm : mesh.periodic_map)
        if (!(in >> pm.first >> pm.second)) throw ParseError("mesh dump: truncated PERIODIC_MAP");
    } else if (tok == "TAGS") {
      int count;
      in >> count;
      mesh.region_tag.resize(count);
      for (auto& t : mesh.region_tag)
        if (!(in >> t)) throw ParseError("mesh dump: truncated TAGS");
    } else if (tok == "FIELD") {
      std::string name;
      int count;
      if (!(in >> name >> count)) throw ParseError("mesh dump: bad FIELD header");
      std::vector<double> values(count);
      for (auto& v : values)
        if (!(in >> v)) throw ParseError("mesh dump: truncated FIELD");
      dump.fields.push_back({name, std::move(values)});
    } else {
      throw ParseError("mesh dump: unknown section " + tok);
    }
  }
  return dump;
}

MeshDump load_mesh_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh dump: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mesh_dump(buf.str());
}

}  // namespace roadnet
