#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

namespace curbgraph {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(Point a, Point b) { return norm(a - b); }

// Axis-aligned rectangle, half-open: [x0,x1) x [y0,y1).
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(Point p) const {
    return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1;
  }
  Point center() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
};

inline std::optional<Rect> intersect(const Rect& a, const Rect& b) {
  Rect r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
         std::min(a.y1, b.y1)};
  if (r.empty()) return std::nullopt;
  return r;
}

// Distance from p to the closed segment [a,b].
inline double dist_point_segment(Point p, Point a, Point b) {
  Point ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 <= 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

// Nearest point on the closed segment [a,b] and its parameter t in [0,1].
inline Point project_point_segment(Point p, Point a, Point b, double* t_out = nullptr) {
  Point ab = b - a;
  double len2 = dot(ab, ab);
  double t = len2 <= 0.0 ? 0.0 : std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return a + ab * t;
}

// Intersection of closed segments [a,b] and [c,d]. Touching endpoints count.
// Collinear overlaps return nothing (callers treat boundary runs along a cut
// line as no crossing).
inline std::optional<Point> segment_intersection(Point a, Point b, Point c, Point d) {
  Point r = b - a;
  Point s = d - c;
  double denom = r.x * s.y - r.y * s.x;
  if (denom == 0.0) return std::nullopt;
  Point ca = c - a;
  double t = (ca.x * s.y - ca.y * s.x) / denom;
  double u = (ca.x * r.y - ca.y * r.x) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + r * t;
}

}  // namespace curbgraph
