#ifndef ROADNET_PATTERN_HPP
#define ROADNET_PATTERN_HPP

#include <string>
#include <variant>
#include <vector>

#include "roadnet/geometry.hpp"

namespace roadnet {

// Endpoints snap to a common node when closer than this on the torus.
inline constexpr double kNodeSnapTol = 1e-9;

struct SegmentSpec {
  Vec2 p;
  Vec2 q;
};

// A full circle is a closed curve with no endpoints. Its polyline
// discretization runs clockwise, so the positive (left-of-tangent) side
// is the outside.
struct CircleSpec {
  Vec2 center;
  double radius = 0.0;
};

// Circular arc from theta0 to theta1 (radians, counterclockwise when
// theta1 > theta0, clockwise otherwise).
struct CircularArcSpec {
  Vec2 center;
  double radius = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
};

struct PolylineSpec {
  std::vector<Vec2> points;
};

// Coordinates are in the unfolded plane; the torus quotient is mod 1 per
// coordinate.
using ArcSpec = std::variant<SegmentSpec, CircleSpec, CircularArcSpec, PolylineSpec>;

double arc_length(const ArcSpec& arc);
bool arc_is_closed(const ArcSpec& arc);
const char* arc_type_name(const ArcSpec& arc);

// One arc end meeting a junction; tangent points away from the junction
// into the arc.
struct NodeEnd {
  int arc = -1;
  int end = 0;  // 0 = start of the arc, 1 = finish
  Vec2 tangent;
};

struct NodeRecord {
  Vec2 position;  // on the torus, in [0,1)^2
  std::vector<NodeEnd> ends;
  int distinct_arcs = 0;
};

// A degree-2 junction whose two outgoing tangents are exactly opposite is a
// smooth continuation, not a node. It is kept separately so validation can
// warn when two different arcs compose a longer smooth curve.
struct SmoothJunction {
  Vec2 position;
  NodeEnd a;
  NodeEnd b;
  bool distinct_arcs = false;
};

class TorusPattern {
 public:
  TorusPattern() = default;
  TorusPattern(std::string name, std::vector<ArcSpec> arcs);

  const std::string& name() const { return name_; }
  const std::vector<ArcSpec>& arcs() const { return arcs_; }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<SmoothJunction>& smooth_junctions() const { return smooth_junctions_; }

  bool empty() const { return arcs_.empty(); }

 private:
  std::string name_ = "empty";
  std::vector<ArcSpec> arcs_;
  std::vector<NodeRecord> nodes_;
  std::vector<SmoothJunction> smooth_junctions_;
};

// Sum of arc lengths per unit cell: exact for segments, circles and circular
// arcs, chord-sum for polylines.
double total_length(const TorusPattern& pattern);

struct NodeAngleReport {
  Vec2 position;
  std::vector<double> pairwise_angles;  // radians, in [0, pi]
  double min_angle = 0.0;               // pi if fewer than two ends
  bool pass = true;
};

struct ValidationReport {
  bool pass = true;
  std::vector<NodeAngleReport> nodes;
  std::vector<std::string> warnings;
};

// A pattern is regular when at every node all pairs of outgoing directions
// differ by more than angle_tol. Opposite directions (angle pi) pass; they
// are reported as smoothness warnings when the two ends belong to
// different arcs.
ValidationReport validate_regularity(const TorusPattern& pattern, double angle_tol);

// All arcs resampled as polylines with segment length <= h; arc endpoints
// are preserved exactly.
TorusPattern discretize(const TorusPattern& pattern, double h);

// Polyline piece of the pattern clipped to the closed unit cell. tangents[i]
// is the unit tangent of the segment points[i] -> points[i+1], inherited
// from the parent primitive so that chunks of one straight segment carry
// bit-identical tangents.
struct PatternPiece {
  std::vector<Vec2> points;
  std::vector<Vec2> tangents;
  int parent_arc = -1;
  bool closed = false;  // closed loop entirely inside the cell

  double length() const;
};

struct PieceEnd {
  int piece = -1;
  int end = 0;  // 0 = front, 1 = back
};

// Pair of boundary endpoints identified under the torus quotient; the two
// window positions differ by exactly one lattice vector.
struct BoundaryIdentification {
  PieceEnd a;
  PieceEnd b;
  Vec2 lattice;  // position(a) - position(b)
};

// Endpoints of different pieces coinciding at an interior point (a pattern
// node falling inside the window).
struct NodeIdentification {
  std::vector<PieceEnd> ends;
  Vec2 position;
};

struct UnfoldedPattern {
  Vec2 offset;
  std::vector<PatternPiece> pieces;
  std::vector<BoundaryIdentification> boundary_identifications;
  std::vector<NodeIdentification> node_identifications;
  // One unclipped sampled chain per arc, already translated into window
  // coordinates; lattice copies of these produce the pieces above. Offset
  // strips are built from them so that strip geometry stays periodic.
  std::vector<PatternPiece> source_chains;

  double total_length() const;
  Vec2 end_position(PieceEnd e) const;
};

// Translate the coordinate system by offset (the pattern stays fixed, the
// cell window moves) and clip the periodic extension to [0,1]^2. Curved arcs
// are sampled at resolution h first. Pieces lying on the far (x=1 or y=1)
// boundary duplicate pieces on the near boundary and are dropped.
UnfoldedPattern unfold(const TorusPattern& pattern, Vec2 offset, double h = 0.02);

// Clips segment [p, q] to the closed unit square, snapping the cut points
// onto the boundary; false when the intersection is empty or a point.
bool clip_segment_to_cell(Vec2& p, Vec2& q);

}  // namespace roadnet

#endif
