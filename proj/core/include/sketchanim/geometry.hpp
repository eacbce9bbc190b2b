#pragma once

#include <Eigen/Core>

#include <vector>

namespace sketchanim {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

/// Simple polygon in pixel units. Vertices sit on pixel corners when traced
/// from a mask; orientation is positive signed area in the pixel frame.
struct Polygon {
  std::vector<Point2> vertices;
};

inline double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Twice the signed area of triangle (a, b, c).
inline double orient2d(const Point2& a, const Point2& b, const Point2& c) {
  return cross(b - a, c - a);
}

double signed_area(const Polygon& poly);
double perimeter(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Point2& p);
bool is_simple(const Polygon& poly);
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

}  // namespace sketchanim
