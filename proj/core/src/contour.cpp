#include "sketchanim/contour.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <array>

namespace sketchanim {

namespace {

// Sets one pixel of every 2x2 checkerboard so 8-connected contacts become
// 4-connected. Repeats until stable; each pass only adds foreground.
BinaryMask bridge_diagonals(BinaryMask m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = -1; y < m.height(); ++y) {
      for (int x = -1; x < m.width(); ++x) {
        const bool a = m.get(x, y), b = m.get(x + 1, y);
        const bool c = m.get(x, y + 1), d = m.get(x + 1, y + 1);
        if (a && d && !b && !c) {
          if (x + 1 < m.width() && y >= 0) m.set(x + 1, y, true);
          else m.set(x, y + 1, true);
          changed = true;
        } else if (b && c && !a && !d) {
          if (x >= 0 && y >= 0) m.set(x, y, true);
          else m.set(x + 1, y + 1, true);
          changed = true;
        }
      }
    }
  }
  return m;
}

constexpr std::array<std::array<int, 2>, 4> kDirs = {{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

// Walks the boundary with foreground on the right-hand side of travel (pixel
// frame, y down). Returns corner points where the direction changes.
std::vector<Point2> walk_boundary(const BinaryMask& m, int sx, int sy) {
  std::vector<Point2> corners;
  int x = sx, y = sy;
  int dir = 0;  // east along the top edge of the start pixel
  auto pixel_ahead = [&](int d, bool right) {
    const int dx = kDirs[d][0], dy = kDirs[d][1];
    // Right normal in the y-down frame is (-dy, dx); left is (dy, -dx).
    const int nx = right ? -dy : dy;
    const int ny = right ? dx : -dx;
    // Pixel whose centre is corner + 0.5*dir + 0.5*normal.
    const int px = x + (dx + nx - 1) / 2;
    const int py = y + (dy + ny - 1) / 2;
    return m.get(px, py);
  };
  const std::size_t limit = 4 * (static_cast<std::size_t>(m.width()) + 1) * (m.height() + 1);
  for (std::size_t step = 0; step < limit; ++step) {
    int next;
    if (!pixel_ahead(dir, true)) next = (dir + 1) % 4;        // turn right
    else if (pixel_ahead(dir, false)) next = (dir + 3) % 4;   // turn left
    else next = dir;
    if (next != dir || step == 0) corners.emplace_back(x, y);
    dir = next;
    x += kDirs[dir][0];
    y += kDirs[dir][1];
    if (x == sx && y == sy) break;
  }
  // The start corner is always a turn (it is the top-left corner of the
  // top-left-most pixel), so the list is already minimal.
  return corners;
}

void dp_recurse(const std::vector<Point2>& pts, std::size_t lo, std::size_t hi, double eps,
                std::vector<char>& keep) {
  if (hi <= lo + 1) return;
  double best = -1.0;
  std::size_t idx = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
    if (d > best) {
      best = d;
      idx = i;
    }
  }
  if (best > eps) {
    keep[idx] = 1;
    dp_recurse(pts, lo, idx, eps, keep);
    dp_recurse(pts, idx, hi, eps, keep);
  }
}

}  // namespace

Polygon simplify_closed(const Polygon& ring, double epsilon) {
  const auto& v = ring.vertices;
  const std::size_t n = v.size();
  if (n <= 4 || epsilon <= 0) return ring;
  // Anchor at vertex 0 and the vertex farthest from it, then simplify both chains.
  std::size_t far = 0;
  double far_d = -1;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = (v[i] - v[0]).squaredNorm();
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  std::vector<Point2> chain(v.begin(), v.end());
  chain.push_back(v[0]);
  std::vector<char> keep(chain.size(), 0);
  keep[0] = keep[far] = keep[n] = 1;
  dp_recurse(chain, 0, far, epsilon, keep);
  dp_recurse(chain, far, n, epsilon, keep);
  Polygon out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.vertices.push_back(v[i]);
  return out;
}

Polygon trace_contour(const BinaryMask& m, double epsilon) {
  if (m.width() == 0 || m.empty()) throw Error(ErrorKind::empty_mask, "cannot trace an empty mask");
  const BinaryMask bridged = bridge_diagonals(m);
  int sx = -1, sy = -1;
  for (int y = 0; y < bridged.height() && sx < 0; ++y)
    for (int x = 0; x < bridged.width(); ++x)
      if (bridged.at(x, y)) {
        sx = x;
        sy = y;
        break;
      }
  Polygon raw{walk_boundary(bridged, sx, sy)};
  // Walking with foreground on the right in a y-down frame gives positive area.
  if (signed_area(raw) < 0) std::reverse(raw.vertices.begin(), raw.vertices.end());
  for (double eps = epsilon; eps >= 0.05; eps *= 0.5) {
    Polygon simplified = simplify_closed(raw, eps);
    if (simplified.vertices.size() >= 3 && is_simple(simplified) && signed_area(simplified) > 0)
      return simplified;
  }
  return raw;
}

}  // namespace sketchanim
