#pragma once

#include <vector>

#include "roadnet/geometry.hpp"
#include "roadnet/pattern.hpp"

namespace roadnet {

// Per-node outcome of the balance check. residual is the sum over incident
// arc ends of the unit vector pointing from the neighboring endpoint toward
// this node; a node is in equilibrium when the sum vanishes.
struct NodeBalance {
  Vec2 position;
  Vec2 residual;
  double residual_norm = 0.0;
  int distinct_arcs = 0;
};

struct BalanceReport {
  bool straight_ok = false;
  bool node_degree_ok = false;
  bool balance_ok = false;
  bool is_balanced = false;  // conjunction of the three flags above
  double max_residual = 0.0;
  std::vector<int> non_straight_arcs;
  std::vector<NodeBalance> low_degree_nodes;  // nodes with < 2 distinct arcs
  std::vector<NodeBalance> nodes;
};

// A pattern is balanced when every arc is straight, every node joins at
// least two distinct arcs, and every node residual has magnitude <= tol.
// Straight patterns without nodes satisfy all conditions vacuously.
BalanceReport check_balance(const TorusPattern& pattern, double tol = 1e-9);

}  // namespace roadnet
