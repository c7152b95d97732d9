#pragma once

#include <array>
#include <set>
#include <vector>

#include "roadnet/geometry.hpp"

namespace roadnet {

// Incremental Delaunay triangulation of points in the unit square, with
// constrained edges recovered by flipping and never flipped afterwards.
// The four square corners are inserted on construction, so every point of
// [0,1]^2 lands inside the triangulation.
class Triangulator {
 public:
  Triangulator();

  // Inserts p and returns its vertex id; a point within snap of an existing
  // vertex returns that vertex, and a point on a constrained edge is
  // rejected (returns -1) to keep constraints intact.
  int insert(Vec2 p, double snap = 1e-12);

  // Makes the segment between vertices u and v appear as triangulation
  // edges and marks them constrained; vertices lying on the open segment
  // split the constraint at that vertex.
  void insert_constraint(int u, int v);

  // Flips non-constrained edges until the empty-circumcircle test passes
  // everywhere (cocircular ties are kept as-is).
  void make_delaunay();

  const std::vector<Vec2>& points() const { return pts_; }
  bool is_constrained(int u, int v) const;
  std::vector<std::array<int, 3>> triangles() const;

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // n[i] faces edge (v[i+1], v[i+2]); -1 on the hull
    bool alive = true;
  };

  static std::pair<int, int> edge_key(int u, int v) {
    return {std::min(u, v), std::max(u, v)};
  }
  int apex_index(int t, int o) const;  // index i with tris_[t].n[i] == o
  int vertex_index(int t, int v) const;
  int locate(Vec2 p) const;
  void flip(int t, int i);
  void legalize(int t, int i);
  bool edge_exists(int u, int v) const;
  std::vector<int> triangles_around(int v) const;
  void set_vtri(int t);

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<int> vtri_;  // one alive triangle touching each vertex
  std::set<std::pair<int, int>> constrained_;
  mutable int hint_ = 0;
};

// Sign predicates with relative tolerance: 0 means degenerate within
// roughly 1e-13 of the operand scale.
int orient_sign(Vec2 a, Vec2 b, Vec2 c);
int incircle_sign(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace roadnet
