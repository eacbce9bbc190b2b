#pragma once

// Brute-force reference implementations used to check the engine.

#include "sketchanim/geometry.hpp"
#include "sketchanim/segment.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <deque>
#include <random>
#include <vector>

namespace oracle {

using sketchanim::BinaryMask;

inline BinaryMask random_mask(std::mt19937& rng, int max_side = 16, double density = 0.45) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::bernoulli_distribution on(density);
  BinaryMask m(side(rng), side(rng));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m.set(x, y, on(rng));
  return m;
}

// Set-algebra dilation: union of the mask shifted by every kernel offset.
inline BinaryMask dilate(const BinaryMask& m, int k) {
  BinaryMask out(m.width(), m.height());
  const int r = k / 2;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
          if (m.get(x - dx, y - dy)) out.set(x, y, true);
  return out;
}

// Erosion with out-of-raster pixels as background.
inline BinaryMask erode(const BinaryMask& m, int k) {
  BinaryMask out(m.width(), m.height(), true);
  const int r = k / 2;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
          if (!m.get(x + dx, y + dy)) out.set(x, y, false);
  return out;
}

// BFS over background from the border (4-connected); unreached -> foreground.
inline BinaryMask fill(const BinaryMask& m) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> q;
  auto push = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= w || y >= h || m.at(x, y) || seen[y * w + x]) return;
    seen[y * w + x] = 1;
    q.emplace_back(x, y);
  };
  for (int x = 0; x < w; ++x) push(x, 0), push(x, h - 1);
  for (int y = 0; y < h; ++y) push(0, y), push(w - 1, y);
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop_front();
    push(x + 1, y), push(x - 1, y), push(x, y + 1), push(x, y - 1);
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, !seen[y * w + x]);
  return out;
}

// Components by BFS; each entry lists its pixels in visit order starting at
// the row-major first pixel.
inline std::vector<std::vector<std::pair<int, int>>> components(const BinaryMask& m, int conn) {
  const int w = m.width(), h = m.height();
  std::vector<char> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::vector<std::pair<int, int>>> out;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (!m.at(x0, y0) || seen[y0 * w + x0]) continue;
      std::vector<std::pair<int, int>> comp;
      std::deque<std::pair<int, int>> q{{x0, y0}};
      seen[y0 * w + x0] = 1;
      while (!q.empty()) {
        auto [x, y] = q.front();
        q.pop_front();
        comp.emplace_back(x, y);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (conn == 4 && dx != 0 && dy != 0)) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !m.at(nx, ny) || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            q.emplace_back(nx, ny);
          }
      }
      out.push_back(std::move(comp));
    }
  return out;
}

inline BinaryMask largest(const BinaryMask& m, int conn) {
  const auto comps = components(m, conn);
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (comps[i].size() > comps[best].size()) best = i;  // strict: earlier wins ties
  BinaryMask out(m.width(), m.height());
  if (!comps.empty())
    for (auto [x, y] : comps[best]) out.set(x, y, true);
  return out;
}

// Number of background regions not connected (4-conn) to the border.
inline int enclosed_holes(const BinaryMask& m) {
  const BinaryMask filled = fill(m);
  BinaryMask holes(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) holes.set(x, y, filled.at(x, y) && !m.at(x, y));
  return static_cast<int>(components(holes, 4).size());
}

// Matrix-stack FK: 4x4 homogeneous matrices multiplied root to leaf.
inline Eigen::Matrix4d rotation(char axis, double deg) {
  const double a = deg * M_PI / 180.0, c = std::cos(a), s = std::sin(a);
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  if (axis == 'X') m.block<3, 3>(0, 0) << 1, 0, 0, 0, c, -s, 0, s, c;
  if (axis == 'Y') m.block<3, 3>(0, 0) << c, 0, s, 0, 1, 0, -s, 0, c;
  if (axis == 'Z') m.block<3, 3>(0, 0) << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

inline Eigen::Matrix4d translation(double x, double y, double z) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 3) = x, m(1, 3) = y, m(2, 3) = z;
  return m;
}

inline double point_segment(const sketchanim::Point2& p, const sketchanim::Point2& a,
                            const sketchanim::Point2& b) {
  const sketchanim::Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

// Ray-casting point-in-polygon.
inline bool inside(const std::vector<sketchanim::Point2>& poly, const sketchanim::Point2& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

inline double shoelace(const std::vector<sketchanim::Point2>& poly) {
  double s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    s += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * s;
}

}  // namespace oracle
