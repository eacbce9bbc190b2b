#include "sketchanim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sketchanim {

double signed_area(const Polygon& poly) {
  const auto& v = poly.vertices;
  double twice = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) twice += cross(v[i], v[(i + 1) % n]);
  return 0.5 * twice;
}

double perimeter(const Polygon& poly) {
  const auto& v = poly.vertices;
  double len = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) len += (v[(i + 1) % n] - v[i]).norm();
  return len;
}

bool point_in_polygon(const Polygon& poly, const Point2& p) {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

int sign(double v) { return (v > 0) - (v < 0); }

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const int o1 = sign(orient2d(a, b, c));
  const int o2 = sign(orient2d(a, b, d));
  const int o3 = sign(orient2d(c, d, a));
  const int o4 = sign(orient2d(c, d, b));
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

bool is_simple(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] == v[(i + 1) % n]) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges may only share their common endpoint.
        const std::size_t shared = (j == i + 1) ? j : i;
        const Point2& a = v[(shared + n - 1) % n];
        const Point2& s = v[shared];
        const Point2& b = v[(shared + 1) % n];
        if (orient2d(a, s, b) == 0.0 && (a - s).dot(b - s) > 0) return false;
        continue;
      }
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace sketchanim
