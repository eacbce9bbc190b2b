#include "sketchanim/segment.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace sketchanim {

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorKind::validation, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void SegmentParams::validate() const {
  if (target_width <= 0) throw Error(ErrorKind::validation, "target_width must be positive");
  if (block_radius < 1) throw Error(ErrorKind::validation, "block_radius must be at least 1");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw Error(ErrorKind::validation, "kernel size must be odd");
  if (connectivity != 4 && connectivity != 8)
    throw Error(ErrorKind::validation, "connectivity must be 4 or 8");
}

namespace {

std::vector<double> gaussian_kernel(int radius) {
  const int size = 2 * radius + 1;
  const double sigma = 0.3 * ((size - 1) * 0.5 - 1) + 0.8;
  std::vector<double> w(size);
  for (int i = 0; i < size; ++i) {
    const double d = i - radius;
    w[i] = std::exp(-(d * d) / (2 * sigma * sigma));
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= sum;
  return w;
}

void check_kernel(int kernel_size) {
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw Error(ErrorKind::validation, "kernel size must be odd");
}

}  // namespace

BinaryMask adaptive_threshold(const GrayImage& img, const SegmentParams& params) {
  params.validate();
  const int w = img.width();
  const int h = img.height();
  const int r = params.block_radius;
  const auto kernel = gaussian_kernel(r);

  // Separable pass: horizontal into a double buffer, then vertical.
  std::vector<double> horiz(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) acc += kernel[k + r] * img.at(std::clamp(x + k, 0, w - 1), y);
      horiz[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mean = 0.0;
      for (int k = -r; k <= r; ++k)
        mean += kernel[k + r] * horiz[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
      const double v = img.at(x, y);
      const bool fg = params.polarity == Polarity::dark_on_light ? v < mean - params.c
                                                                 : v > mean + params.c;
      out.set(x, y, fg);
    }
  }
  return out;
}

BinaryMask morph_dilate(const BinaryMask& m, int kernel_size) {
  check_kernel(kernel_size);
  const int r = kernel_size / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool hit = false;
      for (int dy = -r; dy <= r && !hit; ++dy)
        for (int dx = -r; dx <= r && !hit; ++dx) hit = m.get(x + dx, y + dy);
      out.set(x, y, hit);
    }
  }
  return out;
}

BinaryMask morph_erode(const BinaryMask& m, int kernel_size) {
  check_kernel(kernel_size);
  const int r = kernel_size / 2;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy)
        for (int dx = -r; dx <= r && all; ++dx) all = m.get(x + dx, y + dy);
      out.set(x, y, all);
    }
  }
  return out;
}

BinaryMask morph_close(const BinaryMask& m, int kernel_size) {
  return morph_erode(morph_dilate(m, kernel_size), kernel_size);
}

BinaryMask fill_holes(const BinaryMask& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<std::uint8_t> reached(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * w + x;
    if (!m.at(x, y) && !reached[i]) {
      reached[i] = 1;
      queue.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k];
      const int ny = y + dy[k];
      if (nx >= 0 && ny >= 0 && nx < w && ny < h) seed(nx, ny);
    }
  }
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.set(x, y, !reached[static_cast<std::size_t>(y) * w + x]);
  return out;
}

Components label_components(const BinaryMask& m, int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw Error(ErrorKind::validation, "connectivity must be 4 or 8");
  const int w = m.width();
  const int h = m.height();
  Components c;
  c.labels.assign(static_cast<std::size_t>(w) * h, 0);
  std::deque<std::pair<int, int>> queue;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (!m.at(x0, y0) || c.labels[static_cast<std::size_t>(y0) * w + x0]) continue;
      const int label = static_cast<int>(c.areas.size()) + 1;
      std::size_t area = 0;
      c.labels[static_cast<std::size_t>(y0) * w + x0] = label;
      queue.emplace_back(x0, y0);
      while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        ++area;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (connectivity == 4 && dx != 0 && dy != 0)) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (!m.get(nx, ny)) continue;
            int& l = c.labels[static_cast<std::size_t>(ny) * w + nx];
            if (l) continue;
            l = label;
            queue.emplace_back(nx, ny);
          }
        }
      }
      c.areas.push_back(area);
    }
  }
  return c;
}

BinaryMask largest_component(const BinaryMask& m, int connectivity) {
  const Components c = label_components(m, connectivity);
  if (c.areas.empty()) throw Error(ErrorKind::empty_mask, "mask has no foreground to retain");
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.areas.size(); ++k)
    if (c.areas[k] > c.areas[best]) best = k;
  const int keep = static_cast<int>(best) + 1;
  BinaryMask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      out.set(x, y, c.labels[static_cast<std::size_t>(y) * m.width() + x] == keep);
  return out;
}

BinaryMask extract_mask(const GrayImage& img, const SegmentParams& params) {
  params.validate();
  const GrayImage resized = resize_to_width(img, params.target_width);
  BinaryMask m = adaptive_threshold(resized, params);
  m = morph_close(m, params.kernel_size);
  m = morph_dilate(m, params.kernel_size);
  m = fill_holes(m);
  return largest_component(m, params.connectivity);
}

BinaryMask reapply_fill_rules(const BinaryMask& m, int connectivity) {
  return largest_component(fill_holes(m), connectivity);
}

void stamp_stroke(BinaryMask& m, const std::vector<std::pair<double, double>>& points,
                  double radius, bool value) {
  if (points.empty()) return;
  const double r2 = radius * radius;
  auto stamp_segment = [&](double ax, double ay, double bx, double by) {
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - radius)));
    const int x1 = std::min(m.width() - 1, static_cast<int>(std::ceil(std::max(ax, bx) + radius)));
    const int y1 = std::min(m.height() - 1, static_cast<int>(std::ceil(std::max(ay, by) + radius)));
    const double vx = bx - ax;
    const double vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5 - ax;
        const double py = y + 0.5 - ay;
        const double t = len2 > 0 ? std::clamp((px * vx + py * vy) / len2, 0.0, 1.0) : 0.0;
        const double ex = px - t * vx;
        const double ey = py - t * vy;
        if (ex * ex + ey * ey <= r2) m.set(x, y, value);
      }
    }
  };
  if (points.size() == 1) {
    stamp_segment(points[0].first, points[0].second, points[0].first, points[0].second);
    return;
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    stamp_segment(points[i].first, points[i].second, points[i + 1].first, points[i + 1].second);
}

GrayImage mask_to_gray(const BinaryMask& m) {
  GrayImage g(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) g.at(x, y) = m.at(x, y) ? 255 : 0;
  return g;
}

BinaryMask gray_to_mask(const GrayImage& g) {
  BinaryMask m(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) m.set(x, y, g.at(x, y) >= 128);
  return m;
}

BBox foreground_bbox(const BinaryMask& m) {
  int x0 = m.width(), y0 = m.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return {};
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace sketchanim
