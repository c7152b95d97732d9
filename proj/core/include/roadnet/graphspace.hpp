#pragma once

#include <vector>

#include "roadnet/geometry.hpp"
#include "roadnet/pattern.hpp"

namespace roadnet {

// Piecewise-linear 1D mesh over the unfolded pattern. Interior node
// identifications are always merged; boundary identifications are merged
// only when the graph is built as periodic.
struct GraphEdge {
  int a = -1;  // tail vertex
  int b = -1;  // head vertex
  double length = 0.0;
  Vec2 tangent;  // unit tangent from a to b, inherited from the parent chord
  int parent_arc = -1;
};

struct PatternGraph {
  bool periodic = false;
  std::vector<Vec2> positions;  // representative window position per vertex
  std::vector<GraphEdge> edges;
  std::vector<int> component;  // per-vertex component label in [0, n_components)
  int n_components = 0;

  int n_vertices() const { return (int)positions.size(); }
  double total_length() const;
};

// Values at graph vertices, linear along edges.
using GraphFunction = std::vector<double>;

PatternGraph build_graph(const UnfoldedPattern& unfolded, double h, bool periodic);

// Number of connected components = dimension of the space of functions with
// vanishing seminorm (constants per component).
int kernel_dim(const PatternGraph& graph);

// ||u - <u>||^2 / (l^2 * p(u)^2) with <u> the length-weighted mean and
// p(u)^2 = sum (du/length)^2 * length; bounded by 1 on connected graphs.
double poincare_ratio(const PatternGraph& graph, const GraphFunction& u);

// Distance from the slope field (x_k)_s = T_k to the gradients of periodic
// graph functions: minimizes sum_e length*(T_k - du/length)^2 over u.
double compute_dk(const UnfoldedPattern& unfolded, int k, double h);

struct OffsetSample {
  Vec2 offset;
  double d1sq = 0.0;
  double d2sq = 0.0;
  int components = 0;

  double sum() const { return d1sq + d2sq; }
};

struct DReport {
  double d = 0.0;
  Vec2 argmax_offset;
  std::vector<OffsetSample> table;
};

// Maximizes (d_1#)^2 + (d_2#)^2 over cell translations, sampling a
// grid_n x grid_n offset grid plus offsets placing the cell boundary midway
// between pattern features (arc endpoints and circle extrema) on each axis.
DReport compute_d(const TorusPattern& pattern, int grid_n, double h);

}  // namespace roadnet
