#include "roadnet/balance.hpp"

#include <array>
#include <cmath>

namespace roadnet {

namespace {

constexpr double kCollinearTol = 1e-9;

bool arc_is_straight(const ArcSpec& arc) {
  if (std::holds_alternative<SegmentSpec>(arc)) return true;
  const auto* p = std::get_if<PolylineSpec>(&arc);
  if (!p) return false;
  Vec2 chord = p->points.back() - p->points.front();
  double len = norm(chord);
  if (len < kCollinearTol) return false;
  Vec2 dir = chord / len;
  for (const auto& pt : p->points)
    if (std::fabs(cross(dir, pt - p->points.front())) > kCollinearTol) return false;
  return true;
}

// Endpoints in authored (unwrapped) coordinates: {start, finish}. The chord
// start - finish is lattice-shift invariant, so residuals need no wrapping.
std::array<Vec2, 2> spec_endpoints(const ArcSpec& arc) {
  if (const auto* s = std::get_if<SegmentSpec>(&arc)) return {s->p, s->q};
  if (const auto* c = std::get_if<CircleSpec>(&arc)) {
    Vec2 p = c->center + Vec2{c->radius, 0.0};
    return {p, p};
  }
  if (const auto* a = std::get_if<CircularArcSpec>(&arc))
    return {a->center + a->radius * Vec2{std::cos(a->theta0), std::sin(a->theta0)},
            a->center + a->radius * Vec2{std::cos(a->theta1), std::sin(a->theta1)}};
  const auto& p = std::get<PolylineSpec>(arc);
  return {p.points.front(), p.points.back()};
}

}  // namespace

BalanceReport check_balance(const TorusPattern& pattern, double tol) {
  BalanceReport report;
  const auto& arcs = pattern.arcs();

  for (int i = 0; i < (int)arcs.size(); ++i)
    if (!arc_is_straight(arcs[i])) report.non_straight_arcs.push_back(i);
  report.straight_ok = report.non_straight_arcs.empty();

  for (const auto& node : pattern.nodes()) {
    NodeBalance nb;
    nb.position = node.position;
    nb.distinct_arcs = node.distinct_arcs;
    nb.residual = {0.0, 0.0};
    for (const auto& end : node.ends) {
      auto ends = spec_endpoints(arcs[end.arc]);
      Vec2 chord = ends[end.end] - ends[1 - end.end];  // node minus neighbor
      double len = norm(chord);
      if (len > 0.0) nb.residual = nb.residual + chord / len;
    }
    nb.residual_norm = norm(nb.residual);
    report.max_residual = std::max(report.max_residual, nb.residual_norm);
    if (node.distinct_arcs < 2) report.low_degree_nodes.push_back(nb);
    report.nodes.push_back(nb);
  }

  report.node_degree_ok = report.low_degree_nodes.empty();
  report.balance_ok = report.max_residual <= tol;
  report.is_balanced = report.straight_ok && report.node_degree_ok && report.balance_ok;
  return report;
}

}  // namespace roadnet
