#include "roadnet/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "roadnet/errors.hpp"

namespace roadnet {

namespace {

constexpr double kPi = std::numbers::pi;

std::string arc_label(int index, const ArcSpec& arc) {
  std::ostringstream os;
  os << "arc " << index << " (" << arc_type_name(arc) << ")";
  return os.str();
}

void check_arc(int index, const ArcSpec& arc) {
  if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
    if (dist(s->p, s->q) <= 0.0)
      throw GeometryError(arc_label(index, arc) + ": endpoints coincide");
  } else if (const auto* c = std::get_if<CircleSpec>(&arc)) {
    if (!(c->radius > 0.0))
      throw GeometryError(arc_label(index, arc) + ": radius must be positive");
  } else if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
    if (!(a->radius > 0.0))
      throw GeometryError(arc_label(index, arc) + ": radius must be positive");
    if (a->theta0 == a->theta1)
      throw GeometryError(arc_label(index, arc) + ": zero angular extent");
  } else {
    const auto& p = std::get<PolylineSpec>(arc);
    if (p.points.size() < 2)
      throw GeometryError(arc_label(index, arc) + ": needs at least 2 points");
    for (size_t i = 0; i + 1 < p.points.size(); ++i)
      if (dist(p.points[i], p.points[i + 1]) <= 0.0)
        throw GeometryError(arc_label(index, arc) + ": consecutive points coincide");
  }
}

Vec2 circle_point(Vec2 c, double r, double theta) {
  return {c.x + r * std::cos(theta), c.y + r * std::sin(theta)};
}

// Sampled chain of an arc. Straight segments are kept whole; curved arcs
// become chords of length <= h. Each chord carries its own tangent; chunks
// of one straight primitive all inherit the primitive's tangent.
struct Chain {
  std::vector<Vec2> pts;
  std::vector<Vec2> tans;
  int parent = -1;
  bool closed = false;
};

Chain sample_geometry(const ArcSpec& arc, int parent, double h) {
  Chain ch;
  ch.parent = parent;
  if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
    ch.pts = {s->p, s->q};
    ch.tans = {normalized(s->q - s->p)};
  } else if (const auto* c = std::get_if<CircleSpec>(&arc)) {
    int n = std::max<int>(8, (int)std::ceil(2.0 * kPi * c->radius / h));
    ch.pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
      // clockwise so the left of the tangent is the outside
      double theta = -2.0 * kPi * i / n;
      ch.pts.push_back(i == n ? ch.pts.front() : circle_point(c->center, c->radius, theta));
    }
    for (int i = 0; i < n; ++i) ch.tans.push_back(normalized(ch.pts[i + 1] - ch.pts[i]));
    ch.closed = true;
  } else if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
    double span = a->theta1 - a->theta0;
    int n = std::max<int>(1, (int)std::ceil(a->radius * std::fabs(span) / h));
    ch.pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
      ch.pts.push_back(circle_point(a->center, a->radius, a->theta0 + span * i / n));
    for (int i = 0; i < n; ++i) ch.tans.push_back(normalized(ch.pts[i + 1] - ch.pts[i]));
  } else {
    const auto& p = std::get<PolylineSpec>(arc);
    ch.pts = p.points;
    for (size_t i = 0; i + 1 < p.points.size(); ++i)
      ch.tans.push_back(normalized(p.points[i + 1] - p.points[i]));
    if (p.points.size() > 2 && torus_dist(p.points.front(), p.points.back()) < kNodeSnapTol)
      ch.closed = true;
  }
  return ch;
}

struct ArcEndpoint {
  int arc;
  int end;
  Vec2 position;  // unfolded plane
  Vec2 tangent;   // outgoing, away from the endpoint into the arc
};

std::vector<ArcEndpoint> arc_endpoints(const std::vector<ArcSpec>& arcs) {
  std::vector<ArcEndpoint> out;
  for (int i = 0; i < (int)arcs.size(); ++i) {
    const ArcSpec& arc = arcs[i];
    if (arc_is_closed(arc)) continue;
    if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
      Vec2 t = normalized(s->q - s->p);
      out.push_back({i, 0, s->p, t});
      out.push_back({i, 1, s->q, {-t.x, -t.y}});
    } else if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
      double dir = a->theta1 > a->theta0 ? 1.0 : -1.0;
      auto travel = [&](double theta) -> Vec2 {
        return {-dir * std::sin(theta), dir * std::cos(theta)};
      };
      Vec2 t0 = travel(a->theta0);
      Vec2 t1 = travel(a->theta1);
      out.push_back({i, 0, circle_point(a->center, a->radius, a->theta0), t0});
      out.push_back({i, 1, circle_point(a->center, a->radius, a->theta1), {-t1.x, -t1.y}});
    } else if (const auto* p = std::get_if<PolylineSpec>(&arc)) {
      const auto& pts = p->points;
      out.push_back({i, 0, pts.front(), normalized(pts[1] - pts[0])});
      out.push_back({i, 1, pts.back(), normalized(pts[pts.size() - 2] - pts.back())});
    }
  }
  return out;
}

// Proper crossing of two segments: interiors intersect transversally, or
// the segments overlap collinearly. Shared endpoints do not count.
bool segments_cross(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2) {
  const double eps = 1e-12;
  double d1 = cross(q1 - p1, p2 - p1);
  double d2 = cross(q1 - p1, q2 - p1);
  double d3 = cross(q2 - p2, p1 - p2);
  double d4 = cross(q2 - p2, q1 - p2);
  if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) &&
      ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
    return true;
  // collinear overlap
  if (std::fabs(d1) <= eps && std::fabs(d2) <= eps) {
    Vec2 dir = q1 - p1;
    double len2 = norm2(dir);
    if (len2 == 0.0) return false;
    double a = 0.0, b = 1.0;
    double c = dot(p2 - p1, dir) / len2;
    double d = dot(q2 - p1, dir) / len2;
    if (c > d) std::swap(c, d);
    double lo = std::max(a, c), hi = std::min(b, d);
    return hi - lo > 1e-9 / std::sqrt(len2);
  }
  return false;
}

double exact_distance_to_arc(Vec2 p, const ArcSpec& arc) {
  if (const auto* s = std::get_if<SegmentSpec>(&arc)) {
    return dist_point_segment(p, s->p, s->q);
  }
  if (const auto* c = std::get_if<CircleSpec>(&arc)) {
    return std::fabs(dist(p, c->center) - c->radius);
  }
  if (const auto* a = std::get_if<CircularArcSpec>(&arc)) {
    double lo = std::min(a->theta0, a->theta1), hi = std::max(a->theta0, a->theta1);
    double theta = std::atan2(p.y - a->center.y, p.x - a->center.x);
    for (double t = theta - 4.0 * kPi; t <= theta + 4.0 * kPi + 1e-9; t += 2.0 * kPi)
      if (t >= lo && t <= hi) return std::fabs(dist(p, a->center) - a->radius);
    return std::min(dist(p, circle_point(a->center, a->radius, a->theta0)),
                    dist(p, circle_point(a->center, a->radius, a->theta1)));
  }
  const auto& pl = std::get<PolylineSpec>(arc);
  double best = std::numeric_limits<double>::max();
  for (size_t i = 0; i + 1 < pl.points.size(); ++i)
    best = std::min(best, dist_point_segment(p, pl.points[i], pl.points[i + 1]));
  return best;
}

struct BBox {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  void add(Vec2 p) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  bool overlaps(const BBox& o, double pad) const {
    return x0 <= o.x1 + pad && o.x0 <= x1 + pad && y0 <= o.y1 + pad && o.y0 <= y1 + pad;
  }
};

BBox chain_bbox(const Chain& ch) {
  BBox b;
  for (Vec2 p : ch.pts) b.add(p);
  return b;
}

// Arc-interior crossings are the one geometry error we detect on the torus;
// checked at discretized resolution plus exact endpoint-to-arc distances.
void check_interior_crossings(const std::vector<ArcSpec>& arcs,
                              const std::vector<ArcEndpoint>& endpoints) {
  const double h_check = 0.02;
  std::vector<Chain> chains;
  chains.reserve(arcs.size());
  for (int i = 0; i < (int)arcs.size(); ++i) chains.push_back(sample_geometry(arcs[i], i, h_check));
  std::vector<BBox> boxes;
  for (const auto& ch : chains) boxes.push_back(chain_bbox(ch));

  auto shifted_cross = [&](const Chain& a, const Chain& b, Vec2 shift, bool self) {
    for (size_t i = 0; i + 1 < a.pts.size(); ++i) {
      for (size_t j = 0; j + 1 < b.pts.size(); ++j) {
        if (self && shift.x == 0.0 && shift.y == 0.0) {
          if (i == j) continue;
          size_t lo = std::min(i, j), hi = std::max(i, j);
          if (hi - lo == 1) continue;  // adjacent chords share a vertex
          if (a.closed && lo == 0 && hi + 2 == a.pts.size()) continue;
        }
        if (segments_cross(a.pts[i], a.pts[i + 1], b.pts[j] + shift, b.pts[j + 1] + shift))
          return true;
      }
    }
    return false;
  };

  for (int i = 0; i < (int)arcs.size(); ++i) {
    for (int j = i; j < (int)arcs.size(); ++j) {
      int sx0 = (int)std::floor(boxes[i].x0 - boxes[j].x1) - 1;
      int sx1 = (int)std::ceil(boxes[i].x1 - boxes[j].x0) + 1;
      int sy0 = (int)std::floor(boxes[i].y0 - boxes[j].y1) - 1;
      int sy1 = (int)std::ceil(boxes[i].y1 - boxes[j].y0) + 1;
      for (int sx = sx0; sx <= sx1; ++sx) {
        for (int sy = sy0; sy <= sy1; ++sy) {
          Vec2 shift{(double)sx, (double)sy};
          BBox sb = boxes[j];
          sb.x0 += sx;
          sb.x1 += sx;
          sb.y0 += sy;
          sb.y1 += sy;
          if (!boxes[i].overlaps(sb, 1e-9)) continue;
          if (shifted_cross(chains[i], chains[j], shift, i == j)) {
            std::ostringstream os;
            os << "arcs " << i << " and " << j << " cross away from their endpoints";
            throw GeometryError(os.str());
          }
        }
      }
    }
  }

  // An endpoint of one arc must not sit in the interior of another arc.
  for (const auto& ep : endpoints) {
    for (int j = 0; j < (int)arcs.size(); ++j) {
      BBox pb;
      pb.add(ep.position);
      int sx0 = (int)std::floor(pb.x0 - boxes[j].x1) - 1;
      int sx1 = (int)std::ceil(pb.x1 - boxes[j].x0) + 1;
      int sy0 = (int)std::floor(pb.y0 - boxes[j].y1) - 1;
      int sy1 = (int)std::ceil(pb.y1 - boxes[j].y0) + 1;
      for (int sx = sx0; sx <= sx1; ++sx) {
        for (int sy = sy0; sy <= sy1; ++sy) {
          Vec2 p = ep.position - Vec2{(double)sx, (double)sy};
          if (exact_distance_to_arc(p, arcs[j]) >= kNodeSnapTol) continue;
          bool at_endpoint = (j == ep.arc) && dist(p, ep.position) < kNodeSnapTol;
          for (const auto& other : endpoints)
            if (other.arc == j && dist(p, other.position) < kNodeSnapTol) at_endpoint = true;
          if (!at_endpoint) {
            std::ostringstream os;
            os << "endpoint of arc " << ep.arc << " lies in the interior of arc " << j;
            throw GeometryError(os.str());
          }
        }
      }
    }
  }
}

}  // namespace

double arc_length(const ArcSpec& arc) {
  if (const auto* s = std::get_if<SegmentSpec>(&arc)) return dist(s->p, s->q);
  if (const auto* c = std::get_if<CircleSpec>(&arc)) return 2.0 * kPi * c->radius;
  if (const auto* a = std::get_if<CircularArcSpec>(&arc))
    return a->radius * std::fabs(a->theta1 - a->theta0);
  const auto& p = std::get<PolylineSpec>(arc);
  double len = 0.0;
  for (size_t i = 0; i + 1 < p.points.size(); ++i) len += dist(p.points[i], p.points[i + 1]);
  return len;
}

bool arc_is_closed(const ArcSpec& arc) {
  if (std::holds_alternative<CircleSpec>(arc)) return true;
  if (const auto* p = std::get_if<PolylineSpec>(&arc))
    return p->points.size() > 2 && torus_dist(p->points.front(), p->points.back()) < kNodeSnapTol;
  return false;
}

const char* arc_type_name(const ArcSpec& arc) {
  switch (arc.index()) {
    case 0: return "segment";
    case 1: return "circle";
    case 2: return "arc";
    default: return "polyline";
  }
}

TorusPattern::TorusPattern(std::string name, std::vector<ArcSpec> arcs)
    : name_(std::move(name)), arcs_(std::move(arcs)) {
  for (int i = 0; i < (int)arcs_.size(); ++i) check_arc(i, arcs_[i]);

  auto endpoints = arc_endpoints(arcs_);
  check_interior_crossings(arcs_, endpoints);

  // Group endpoints by torus position (snap tolerance kNodeSnapTol).
  int n = (int)endpoints.size();
  std::vector<int> group(n);
  for (int i = 0; i < n; ++i) group[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (torus_dist(endpoints[i].position, endpoints[j].position) < kNodeSnapTol)
        group[find(i)] = find(j);

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  for (const auto& [root, members] : groups) {
    Vec2 pos = wrap01(endpoints[members.front()].position);
    std::vector<NodeEnd> ends;
    for (int m : members) ends.push_back({endpoints[m].arc, endpoints[m].end, endpoints[m].tangent});
    if (ends.size() == 2 && norm(ends[0].tangent + ends[1].tangent) < kNodeSnapTol) {
      smooth_junctions_.push_back(
          {pos, ends[0], ends[1], ends[0].arc != ends[1].arc});
      continue;
    }
    NodeRecord node;
    node.position = pos;
    node.ends = std::move(ends);
    std::vector<int> arcs_here;
    for (const auto& e : node.ends) arcs_here.push_back(e.arc);
    std::sort(arcs_here.begin(), arcs_here.end());
    arcs_here.erase(std::unique(arcs_here.begin(), arcs_here.end()), arcs_here.end());
    node.distinct_arcs = (int)arcs_here.size();
    nodes_.push_back(std::move(node));
  }
}

double total_length(const TorusPattern& pattern) {
  double len = 0.0;
  for (const auto& arc : pattern.arcs()) len += arc_length(arc);
  return len;
}

ValidationReport validate_regularity(const TorusPattern& pattern, double angle_tol) {
  ValidationReport report;
  for (const auto& node : pattern.nodes()) {
    NodeAngleReport nr;
    nr.position = node.position;
    nr.min_angle = kPi;
    for (size_t i = 0; i < node.ends.size(); ++i) {
      for (size_t j = i + 1; j < node.ends.size(); ++j) {
        Vec2 a = node.ends[i].tangent, b = node.ends[j].tangent;
        double angle = std::atan2(std::fabs(cross(a, b)), dot(a, b));
        nr.pairwise_angles.push_back(angle);
        nr.min_angle = std::min(nr.min_angle, angle);
        if (norm(a + b) < kNodeSnapTol && node.ends[i].arc != node.ends[j].arc) {
          std::ostringstream os;
          os << "arcs " << node.ends[i].arc << " and " << node.ends[j].arc
             << " compose a smooth curve through the node at (" << node.position.x << ", "
             << node.position.y << ")";
          report.warnings.push_back(os.str());
        }
      }
    }
    nr.pass = nr.min_angle > angle_tol;
    report.pass = report.pass && nr.pass;
    report.nodes.push_back(std::move(nr));
  }
  for (const auto& sj : pattern.smooth_junctions()) {
    if (!sj.distinct_arcs) continue;
    std::ostringstream os;
    os << "arcs " << sj.a.arc << " and " << sj.b.arc << " compose a smooth curve at ("
       << sj.position.x << ", " << sj.position.y << ")";
    report.warnings.push_back(os.str());
  }
  return report;
}

TorusPattern discretize(const TorusPattern& pattern, double h) {
  if (!(h > 0.0)) throw ParameterError("discretize: h must be positive");
  std::vector<ArcSpec> out;
  out.reserve(pattern.arcs().size());
  for (const auto& arc : pattern.arcs()) {
    Chain ch = sample_geometry(arc, 0, h);
    PolylineSpec poly;
    poly.points.reserve(ch.pts.size());
    // split any chord longer than h into equal chunks
    poly.points.push_back(ch.pts.front());
    for (size_t i = 0; i + 1 < ch.pts.size(); ++i) {
      Vec2 p = ch.pts[i], q = ch.pts[i + 1];
      int m = std::max<int>(1, (int)std::ceil(dist(p, q) / h - 1e-12));
      for (int k = 1; k <= m; ++k)
        poly.points.push_back(k == m ? q : p + (double(k) / m) * (q - p));
    }
    out.push_back(std::move(poly));
  }
  return TorusPattern(pattern.name(), std::move(out));
}

double PatternPiece::length() const {
  double len = 0.0;
  for (size_t i = 0; i + 1 < points.size(); ++i) len += dist(points[i], points[i + 1]);
  return len;
}

double UnfoldedPattern::total_length() const {
  double len = 0.0;
  for (const auto& p : pieces) len += p.length();
  return len;
}

Vec2 UnfoldedPattern::end_position(PieceEnd e) const {
  const auto& p = pieces[e.piece];
  return e.end == 0 ? p.points.front() : p.points.back();
}

namespace {

constexpr double kBoundaryTol = 1e-12;

bool inside_cell(Vec2 p) {
  return p.x >= -kBoundaryTol && p.x <= 1.0 + kBoundaryTol && p.y >= -kBoundaryTol &&
         p.y <= 1.0 + kBoundaryTol;
}

Vec2 snap_to_cell(Vec2 p) {
  if (std::fabs(p.x) < kBoundaryTol) p.x = 0.0;
  if (std::fabs(p.x - 1.0) < kBoundaryTol) p.x = 1.0;
  if (std::fabs(p.y) < kBoundaryTol) p.y = 0.0;
  if (std::fabs(p.y - 1.0) < kBoundaryTol) p.y = 1.0;
  return p;
}

// Clip segment [p,q] to the unit cell. Returns false when the intersection
// is empty or a single point; otherwise fills the clipped endpoints and
// entry/exit flags.
bool clip_segment(Vec2 p, Vec2 q, Vec2& c0, Vec2& c1, bool& cut0, bool& cut1) {
  double t0 = 0.0, t1 = 1.0;
  Vec2 d = q - p;
  auto clip1 = [&](double pk, double qk) {
    if (pk == 0.0) return qk >= -kBoundaryTol;
    double r = qk / pk;
    if (pk < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  if (!clip1(-d.x, p.x)) return false;
  if (!clip1(d.x, 1.0 - p.x)) return false;
  if (!clip1(-d.y, p.y)) return false;
  if (!clip1(d.y, 1.0 - p.y)) return false;
  if (t1 - t0 < 1e-14) return false;
  cut0 = t0 > 0.0;
  cut1 = t1 < 1.0;
  c0 = cut0 ? snap_to_cell(p + t0 * d) : p;
  c1 = cut1 ? snap_to_cell(p + t1 * d) : q;
  return true;
}

bool on_far_boundary(const std::vector<Vec2>& pts) {
  bool all_x1 = true, all_y1 = true;
  for (Vec2 p : pts) {
    if (std::fabs(p.x - 1.0) > kBoundaryTol) all_x1 = false;
    if (std::fabs(p.y - 1.0) > kBoundaryTol) all_y1 = false;
  }
  return all_x1 || all_y1;
}

}  // namespace

bool clip_segment_to_cell(Vec2& p, Vec2& q) {
  Vec2 c0, c1;
  bool cut0 = false, cut1 = false;
  if (!clip_segment(p, q, c0, c1, cut0, cut1)) return false;
  p = c0;
  q = c1;
  return true;
}

UnfoldedPattern unfold(const TorusPattern& pattern, Vec2 offset, double h) {
  if (!(h > 0.0)) throw ParameterError("unfold: h must be positive");
  UnfoldedPattern out;
  out.offset = wrap01(offset);

  for (int ai = 0; ai < (int)pattern.arcs().size(); ++ai) {
    Chain ch = sample_geometry(pattern.arcs()[ai], ai, h);
    for (Vec2& p : ch.pts) p = p - out.offset;

    PatternPiece source;
    source.points = ch.pts;
    source.tangents = ch.tans;
    source.parent_arc = ai;
    source.closed = ch.closed;
    out.source_chains.push_back(std::move(source));

    BBox box = chain_bbox(ch);
    int sx0 = (int)std::ceil(-box.x1 - kBoundaryTol);
    int sx1 = (int)std::floor(1.0 - box.x0 + kBoundaryTol);
    int sy0 = (int)std::ceil(-box.y1 - kBoundaryTol);
    int sy1 = (int)std::floor(1.0 - box.y0 + kBoundaryTol);

    for (int sx = sx0; sx <= sx1; ++sx) {
      for (int sy = sy0; sy <= sy1; ++sy) {
        Vec2 shift{(double)sx, (double)sy};
        std::vector<Vec2> pts(ch.pts.size());
        for (size_t i = 0; i < ch.pts.size(); ++i) pts[i] = snap_to_cell(ch.pts[i] + shift);

        // For a closed chain crossing the boundary, start the walk outside.
        size_t nseg = ch.tans.size();
        std::vector<size_t> order(nseg);
        bool closed_inside = ch.closed;
        size_t start = 0;
        if (ch.closed) {
          for (size_t i = 0; i < pts.size(); ++i) {
            if (!inside_cell(pts[i])) {
              closed_inside = false;
              start = i;
              break;
            }
          }
        }
        for (size_t i = 0; i < nseg; ++i) order[i] = (start + i) % nseg;

        PatternPiece piece;
        auto flush = [&]() {
          if (piece.points.size() >= 2 && piece.length() > 1e-12 &&
              !on_far_boundary(piece.points)) {
            out.pieces.push_back(piece);
          }
          piece = PatternPiece{};
        };

        for (size_t k = 0; k < nseg; ++k) {
          size_t i = order[k];
          Vec2 p = pts[i], q = pts[(i + 1) % pts.size()];
          if (ch.closed && i + 1 == pts.size()) q = pts[0];
          Vec2 c0, c1;
          bool cut0 = false, cut1 = false;
          if (!clip_segment(p, q, c0, c1, cut0, cut1)) {
            flush();
            continue;
          }
          if (piece.points.empty()) {
            piece.parent_arc = ai;
            piece.points.push_back(c0);
          } else if (dist(piece.points.back(), c0) > kBoundaryTol) {
            flush();
            piece.parent_arc = ai;
            piece.points.push_back(c0);
          }
          piece.points.push_back(c1);
          piece.tangents.push_back(ch.tans[i]);
          if (cut1) flush();
        }
        if (closed_inside && piece.points.size() >= 2) {
          piece.closed = true;
          flush();
        } else {
          flush();
        }
      }
    }
  }

  // Endpoint coincidence groups: same torus position. Within a group,
  // sub-groups by window position give interior node identifications;
  // distinct sub-groups differ by a lattice vector and give boundary pairs.
  std::vector<PieceEnd> ends;
  for (int pi = 0; pi < (int)out.pieces.size(); ++pi) {
    if (out.pieces[pi].closed) continue;
    ends.push_back({pi, 0});
    ends.push_back({pi, 1});
  }
  int n = (int)ends.size();
  std::vector<int> group(n);
  for (int i = 0; i < n; ++i) group[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (torus_dist(out.end_position(ends[i]), out.end_position(ends[j])) < kNodeSnapTol)
        group[find(i)] = find(j);

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);

  for (const auto& [root, members] : groups) {
    if (members.size() < 2) continue;
    // sub-group by window position
    std::vector<std::vector<int>> subs;
    for (int m : members) {
      bool placed = false;
      for (auto& sub : subs) {
        if (dist(out.end_position(ends[sub.front()]), out.end_position(ends[m])) < kNodeSnapTol) {
          sub.push_back(m);
          placed = true;
          break;
        }
      }
      if (!placed) subs.push_back({m});
    }
    for (const auto& sub : subs) {
      if (sub.size() < 2) continue;
      NodeIdentification ni;
      ni.position = out.end_position(ends[sub.front()]);
      for (int m : sub) ni.ends.push_back(ends[m]);
      out.node_identifications.push_back(std::move(ni));
    }
    for (size_t s = 1; s < subs.size(); ++s) {
      BoundaryIdentification bi;
      bi.a = ends[subs[0].front()];
      bi.b = ends[subs[s].front()];
      Vec2 diff = out.end_position(bi.a) - out.end_position(bi.b);
      bi.lattice = {std::round(diff.x), std::round(diff.y)};
      out.boundary_identifications.push_back(bi);
    }
  }

  return out;
}

}  // namespace roadnet
