#include "roadnet/delaunay.hpp"

#include <algorithm>
#include <cmath>

#include "roadnet/errors.hpp"

namespace roadnet {

int orient_sign(Vec2 a, Vec2 b, Vec2 c) {
  double det = cross(b - a, c - a);
  double scale = norm(b - a) * norm(c - a);
  if (std::fabs(det) <= 1e-13 * scale) return 0;
  return det > 0.0 ? 1 : -1;
}

int incircle_sign(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double adx = a.x - d.x, ady = a.y - d.y;
  double bdx = b.x - d.x, bdy = b.y - d.y;
  double cdx = c.x - d.x, cdy = c.y - d.y;
  double ad2 = adx * adx + ady * ady;
  double bd2 = bdx * bdx + bdy * bdy;
  double cd2 = cdx * cdx + cdy * cdy;
  double det = adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
               ad2 * (bdx * cdy - cdx * bdy);
  double m = std::max({ad2, bd2, cd2});
  if (std::fabs(det) <= 1e-12 * m * m) return 0;
  return det > 0.0 ? 1 : -1;
}

Triangulator::Triangulator() {
  pts_ = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  tris_.push_back({{0, 1, 2}, {-1, 1, -1}, true});
  tris_.push_back({{0, 2, 3}, {-1, -1, 0}, true});
  vtri_ = {0, 0, 0, 1};
}

int Triangulator::apex_index(int t, int o) const {
  for (int k = 0; k < 3; ++k)
    if (tris_[t].n[k] == o) return k;
  return -1;
}

int Triangulator::vertex_index(int t, int v) const {
  for (int k = 0; k < 3; ++k)
    if (tris_[t].v[k] == v) return k;
  return -1;
}

void Triangulator::set_vtri(int t) {
  for (int k = 0; k < 3; ++k) vtri_[tris_[t].v[k]] = t;
}

bool Triangulator::is_constrained(int u, int v) const {
  return constrained_.count(edge_key(u, v)) > 0;
}

std::vector<std::array<int, 3>> Triangulator::triangles() const {
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris_)
    if (t.alive) out.push_back(t.v);
  return out;
}

int Triangulator::locate(Vec2 p) const {
  int t = hint_;
  if (t < 0 || t >= (int)tris_.size() || !tris_[t].alive) t = 0;
  int limit = 4 * (int)tris_.size() + 100;
  for (int step = 0; step < limit; ++step) {
    const Tri& T = tris_[t];
    int moved = -1;
    for (int k = 0; k < 3; ++k) {
      int i = (step + k) % 3;
      if (orient_sign(pts_[T.v[(i + 1) % 3]], pts_[T.v[(i + 2) % 3]], p) < 0 && T.n[i] >= 0) {
        moved = T.n[i];
        break;
      }
    }
    if (moved < 0) {
      hint_ = t;
      return t;
    }
    t = moved;
  }
  for (int i = 0; i < (int)tris_.size(); ++i) {
    const Tri& T = tris_[i];
    if (!T.alive) continue;
    if (orient_sign(pts_[T.v[1]], pts_[T.v[2]], p) >= 0 &&
        orient_sign(pts_[T.v[2]], pts_[T.v[0]], p) >= 0 &&
        orient_sign(pts_[T.v[0]], pts_[T.v[1]], p) >= 0) {
      hint_ = i;
      return i;
    }
  }
  throw MeshError("triangulation point location failed");
}

int Triangulator::insert(Vec2 p, double snap) {
  int t = locate(p);
  {
    const Tri& T = tris_[t];
    for (int k = 0; k < 3; ++k)
      if (dist(pts_[T.v[k]], p) <= snap) return T.v[k];
  }
  int a0 = tris_[t].v[0], a1 = tris_[t].v[1], a2 = tris_[t].v[2];
  int o0 = orient_sign(pts_[a1], pts_[a2], p);
  int o1 = orient_sign(pts_[a2], pts_[a0], p);
  int o2 = orient_sign(pts_[a0], pts_[a1], p);
  int zeros = (o0 == 0) + (o1 == 0) + (o2 == 0);
  if (zeros >= 2) {
    // at a vertex beyond the snap radius: return the nearest one
    int best = a0;
    for (int v : {a1, a2})
      if (dist(pts_[v], p) < dist(pts_[best], p)) best = v;
    return best;
  }

  int w = (int)pts_.size();
  pts_.push_back(p);
  vtri_.push_back(-1);

  if (zeros == 0) {
    // interior: split 1 -> 3
    int na = tris_[t].n[0], nb = tris_[t].n[1], nc = tris_[t].n[2];
    int t2 = (int)tris_.size();
    int t3 = t2 + 1;
    tris_[t] = {{a0, a1, w}, {t2, t3, nc}, true};
    tris_.push_back({{a1, a2, w}, {t3, t, na}, true});
    tris_.push_back({{a2, a0, w}, {t, t2, nb}, true});
    if (na >= 0) tris_[na].n[apex_index(na, t)] = t2;
    if (nb >= 0) tris_[nb].n[apex_index(nb, t)] = t3;
    set_vtri(t);
    set_vtri(t2);
    set_vtri(t3);
    legalize(t, 2);
    legalize(t2, 2);
    legalize(t3, 2);
    hint_ = t;
    return w;
  }

  // on an edge: rotate indices so the zero edge is (b, c) opposite a
  int i = o0 == 0 ? 0 : (o1 == 0 ? 1 : 2);
  int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3], c = tris_[t].v[(i + 2) % 3];
  if (is_constrained(b, c)) {
    pts_.pop_back();
    vtri_.pop_back();
    return -1;
  }
  int o = tris_[t].n[i];
  int n1 = tris_[t].n[(i + 1) % 3];  // faces (c, a)
  int n2 = tris_[t].n[(i + 2) % 3];  // faces (a, b)

  if (o < 0) {
    // hull edge: split 1 -> 2
    int t2 = (int)tris_.size();
    tris_[t] = {{a, b, w}, {-1, t2, n2}, true};
    tris_.push_back({{a, w, c}, {-1, n1, t}, true});
    if (n1 >= 0) tris_[n1].n[apex_index(n1, t)] = t2;
    set_vtri(t);
    set_vtri(t2);
    legalize(t, 2);
    legalize(t2, 1);
    hint_ = t;
    return w;
  }

  // interior edge: split 2 -> 4
  int j = apex_index(o, t);
  int q = tris_[o].v[j];
  int oq_bq = tris_[o].n[(j + 1) % 3];  // faces (a, q)... see layout below
  int oq_qc = tris_[o].n[(j + 2) % 3];
  // o = (q, c, b) in its own order: o.v[j+1] == c, o.v[j+2] == b;
  // o.n[j+1] faces (b, q), o.n[j+2] faces (q, c).
  int t2 = (int)tris_.size();
  int t4 = t2 + 1;
  tris_[t] = {{a, b, w}, {o, t2, n2}, true};
  tris_.push_back({{a, w, c}, {t4, n1, t}, true});
  tris_[o] = {{q, w, b}, {t, oq_bq, t4}, true};
  tris_.push_back({{q, c, w}, {t2, o, oq_qc}, true});
  if (n1 >= 0) tris_[n1].n[apex_index(n1, t)] = t2;
  if (oq_qc >= 0) tris_[oq_qc].n[apex_index(oq_qc, o)] = t4;
  set_vtri(t);
  set_vtri(t2);
  set_vtri(o);
  set_vtri(t4);
  legalize(t, 2);
  legalize(t2, 1);
  legalize(o, 1);
  legalize(t4, 2);
  hint_ = t;
  return w;
}

void Triangulator::legalize(int t0, int i0) {
  std::vector<std::pair<int, int>> stack{{t0, i0}};
  while (!stack.empty()) {
    auto [t, i] = stack.back();
    stack.pop_back();
    int o = tris_[t].n[i];
    if (o < 0) continue;
    int p = tris_[t].v[i], a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
    if (is_constrained(a, b)) continue;
    int j = apex_index(o, t);
    if (j < 0) continue;
    int q = tris_[o].v[j];
    if (incircle_sign(pts_[p], pts_[a], pts_[b], pts_[q]) > 0 &&
        orient_sign(pts_[p], pts_[a], pts_[q]) > 0 &&
        orient_sign(pts_[p], pts_[q], pts_[b]) > 0) {
      flip(t, i);
      stack.push_back({t, 0});
      stack.push_back({o, 0});
    }
  }
}

void Triangulator::flip(int t, int i) {
  int o = tris_[t].n[i];
  int j = apex_index(o, t);
  int p = tris_[t].v[i], a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
  int q = tris_[o].v[j];
  int nb_bp = tris_[t].n[(i + 1) % 3];
  int nb_pa = tris_[t].n[(i + 2) % 3];
  int nb_aq = tris_[o].n[(j + 1) % 3];  // o = (q, b, a): n[j+1] faces (a, q)
  int nb_qb = tris_[o].n[(j + 2) % 3];
  tris_[t] = {{p, a, q}, {nb_aq, o, nb_pa}, true};
  tris_[o] = {{p, q, b}, {nb_qb, nb_bp, t}, true};
  if (nb_aq >= 0) tris_[nb_aq].n[apex_index(nb_aq, o)] = t;
  if (nb_bp >= 0) tris_[nb_bp].n[apex_index(nb_bp, t)] = o;
  set_vtri(t);
  set_vtri(o);
}

bool Triangulator::edge_exists(int u, int v) const {
  for (int t : triangles_around(u))
    if (vertex_index(t, v) >= 0) return true;
  return false;
}

std::vector<int> Triangulator::triangles_around(int v) const {
  std::vector<int> out;
  int t0 = vtri_[v];
  if (t0 < 0 || !tris_[t0].alive || vertex_index(t0, v) < 0) {
    t0 = -1;
    for (int t = 0; t < (int)tris_.size() && t0 < 0; ++t)
      if (tris_[t].alive && vertex_index(t, v) >= 0) t0 = t;
    if (t0 < 0) return out;
  }
  int t = t0;
  bool closed = false;
  for (;;) {
    out.push_back(t);
    int i = vertex_index(t, v);
    int nxt = tris_[t].n[(i + 1) % 3];
    if (nxt < 0) break;
    if (nxt == t0) {
      closed = true;
      break;
    }
    t = nxt;
  }
  if (!closed) {
    t = t0;
    for (;;) {
      int i = vertex_index(t, v);
      int nxt = tris_[t].n[(i + 2) % 3];
      if (nxt < 0) break;
      t = nxt;
      out.push_back(t);
    }
  }
  return out;
}

void Triangulator::insert_constraint(int u, int v) {
  if (u < 0 || v < 0) throw MeshError("constraint endpoint was not inserted");
  for (int guard = 0; guard < 10000; ++guard) {
    if (u == v) return;
    if (edge_exists(u, v)) {
      constrained_.insert(edge_key(u, v));
      return;
    }
    Vec2 pu = pts_[u], pv = pts_[v];
    double seg_len = dist(pu, pv);

    // Find within the star of u either a vertex lying on the segment (the
    // constraint then splits there) or the triangle whose far edge the
    // segment crosses first.
    int split_vertex = -1;
    int t_cross = -1;
    for (int t : triangles_around(u)) {
      int i = vertex_index(t, u);
      int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
      for (int w : {a, b}) {
        if (w == v) continue;
        if (orient_sign(pu, pv, pts_[w]) == 0 && dot(pts_[w] - pu, pv - pu) > 0.0 &&
            dist(pu, pts_[w]) < seg_len) {
          split_vertex = w;
          break;
        }
      }
      if (split_vertex >= 0) break;
      if (orient_sign(pu, pv, pts_[a]) < 0 && orient_sign(pu, pv, pts_[b]) > 0) t_cross = t;
    }
    if (split_vertex >= 0) {
      insert_constraint(u, split_vertex);
      u = split_vertex;
      continue;
    }
    if (t_cross < 0) throw MeshError("constraint recovery lost the segment direction");

    // Tunnel along the segment collecting crossed edges.
    std::vector<std::pair<int, int>> crossed;
    int t = t_cross;
    int e = vertex_index(t, u);
    bool resplit = false;
    for (;;) {
      crossed.push_back({t, e});
      int o = tris_[t].n[e];
      if (o < 0) throw MeshError("constraint recovery left the triangulation");
      if (vertex_index(o, v) >= 0) break;
      int j = apex_index(o, t);
      int q = tris_[o].v[j];
      int oq = orient_sign(pu, pv, pts_[q]);
      if (oq == 0) {
        split_vertex = q;
        resplit = true;
        break;
      }
      // crossed edge of o: between its apex q and the endpoint on the other
      // side of the segment
      e = (oq > 0) ? (j + 1) % 3 : (j + 2) % 3;
      t = o;
    }
    if (resplit) {
      insert_constraint(u, split_vertex);
      u = split_vertex;
      continue;
    }

    // Flip the first crossed edge whose surrounding quad is strictly convex.
    bool flipped = false;
    for (auto [ct, ce] : crossed) {
      int a = tris_[ct].v[(ce + 1) % 3], b = tris_[ct].v[(ce + 2) % 3];
      if (is_constrained(a, b))
        throw MeshError("constrained edges cross; the geometry is inconsistent");
      int o = tris_[ct].n[ce];
      int j = apex_index(o, ct);
      int p = tris_[ct].v[ce], q = tris_[o].v[j];
      if (orient_sign(pts_[p], pts_[a], pts_[q]) > 0 &&
          orient_sign(pts_[p], pts_[q], pts_[b]) > 0) {
        flip(ct, ce);
        flipped = true;
        break;
      }
    }
    if (!flipped) throw MeshError("constraint recovery found no flippable edge");
  }
  throw MeshError("constraint recovery did not terminate");
}

void Triangulator::make_delaunay() {
  for (int pass = 0; pass < 200; ++pass) {
    bool any = false;
    for (int t = 0; t < (int)tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      for (int i = 0; i < 3; ++i) {
        int o = tris_[t].n[i];
        if (o <= t) continue;  // visit each interior edge once
        int a = tris_[t].v[(i + 1) % 3], b = tris_[t].v[(i + 2) % 3];
        if (is_constrained(a, b)) continue;
        int j = apex_index(o, t);
        if (j < 0) continue;
        int p = tris_[t].v[i], q = tris_[o].v[j];
        if (incircle_sign(pts_[p], pts_[a], pts_[b], pts_[q]) > 0 &&
            orient_sign(pts_[p], pts_[a], pts_[q]) > 0 &&
            orient_sign(pts_[p], pts_[q], pts_[b]) > 0) {
          flip(t, i);
          any = true;
          break;
        }
      }
    }
    if (!any) return;
  }
}

}  // namespace roadnet
