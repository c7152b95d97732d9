#ifndef ROADNET_GEOMETRY_HPP
#define ROADNET_GEOMETRY_HPP

#include <cmath>

namespace roadnet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }

// Rotation by +90 degrees; used as the left normal of a tangent direction.
inline Vec2 left_normal(Vec2 t) { return {-t.y, t.x}; }

inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Distance from p to the segment [a, b].
inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double den = norm2(d);
  if (den == 0.0) return dist(p, a);
  double t = dot(p - a, d) / den;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return dist(p, a + t * d);
}

// Wrap a coordinate into [0, 1).
inline double wrap01(double v) {
  double w = v - std::floor(v);
  if (w >= 1.0) w = 0.0;
  return w;
}

inline Vec2 wrap01(Vec2 p) { return {wrap01(p.x), wrap01(p.y)}; }

// Distance on the unit torus (minimum over lattice shifts).
inline double torus_dist(Vec2 a, Vec2 b) {
  double dx = std::fabs(wrap01(a.x) - wrap01(b.x));
  double dy = std::fabs(wrap01(a.y) - wrap01(b.y));
  dx = std::min(dx, 1.0 - dx);
  dy = std::min(dy, 1.0 - dy);
  return std::hypot(dx, dy);
}

}  // namespace roadnet

#endif
