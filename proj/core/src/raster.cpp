#include "sketchanim/raster.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sketchanim {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorKind::validation, "image dimensions must be positive, got " +
                                           std::to_string(width) + "x" + std::to_string(height));
}

struct Tap {
  int i0;
  int i1;
  double t;
};

// Half-pixel-centre source coordinates for each destination index.
std::vector<Tap> bilinear_taps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    const int i1 = std::min(i0 + 1, src - 1);
    taps[i] = {i0, i1, s - i0};
  }
  return taps;
}

int scaled_height(int w, int h, int target_width) {
  if (target_width <= 0)
    throw Error(ErrorKind::validation, "resize target width must be positive");
  const double exact = static_cast<double>(h) * target_width / w;
  return std::max(1, static_cast<int>(std::lround(exact)));
}

template <typename Sample>
void resample(int src_w, int src_h, int dst_w, int dst_h, int channels, Sample&& sample,
              std::uint8_t* out) {
  const auto xs = bilinear_taps(src_w, dst_w);
  const auto ys = bilinear_taps(src_h, dst_h);
  for (int y = 0; y < dst_h; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < dst_w; ++x) {
      const Tap& tx = xs[x];
      for (int c = 0; c < channels; ++c) {
        const double top = (1 - tx.t) * sample(tx.i0, ty.i0, c) + tx.t * sample(tx.i1, ty.i0, c);
        const double bot = (1 - tx.t) * sample(tx.i0, ty.i1, c) + tx.t * sample(tx.i1, ty.i1, c);
        const double v = (1 - ty.t) * top + ty.t * bot;
        out[(static_cast<std::size_t>(y) * dst_w + x) * channels + c] =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height * 4, fill);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> rgba)
    : width_(width), height_(height), pixels_(std::move(rgba)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 4)
    throw Error(ErrorKind::validation, "RGBA buffer length does not match dimensions");
}

void RasterImage::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b,
                      std::uint8_t a) {
  std::uint8_t* p = pixel(x, y);
  p[0] = r;
  p[1] = g;
  p[2] = b;
  p[3] = a;
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), pixels_(std::move(values)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorKind::validation, "gray buffer length does not match dimensions");
}

BBox clip_box(const BBox& box, int width, int height) {
  const int x0 = std::max(box.x, 0);
  const int y0 = std::max(box.y, 0);
  const int x1 = std::min(box.x + box.w, width);
  const int y1 = std::min(box.y + box.h, height);
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

BBox union_box(const BBox& a, const BBox& b) {
  const int x0 = std::min(a.x, b.x);
  const int y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w);
  const int y1 = std::max(a.y + a.h, b.y + b.h);
  return {x0, y0, x1 - x0, y1 - y0};
}

GrayImage to_grayscale(const RasterImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* p = img.pixel(x, y);
      const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
      out.at(x, y) = static_cast<std::uint8_t>(std::min(255L, std::lround(luma)));
    }
  }
  return out;
}

RasterImage crop(const RasterImage& img, const BBox& box) {
  if (box.w <= 0 || box.h <= 0)
    throw Error(ErrorKind::invalid_box, "bounding box must have positive size");
  const BBox c = clip_box(box, img.width(), img.height());
  if (c.w <= 0 || c.h <= 0)
    throw Error(ErrorKind::invalid_box, "bounding box does not intersect the image");
  RasterImage out(c.w, c.h);
  for (int y = 0; y < c.h; ++y) {
    const std::uint8_t* src = img.pixel(c.x, c.y + y);
    std::copy(src, src + static_cast<std::size_t>(c.w) * 4, out.pixel(0, y));
  }
  return out;
}

GrayImage resize_to_width(const GrayImage& img, int target_width) {
  const int h = scaled_height(img.width(), img.height(), target_width);
  if (target_width == img.width() && h == img.height()) return img;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(target_width) * h);
  resample(img.width(), img.height(), target_width, h, 1,
           [&](int x, int y, int) { return static_cast<double>(img.at(x, y)); }, out.data());
  return GrayImage(target_width, h, std::move(out));
}

RasterImage resize_to_width(const RasterImage& img, int target_width) {
  const int h = scaled_height(img.width(), img.height(), target_width);
  if (target_width == img.width() && h == img.height()) return img;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(target_width) * h * 4);
  resample(img.width(), img.height(), target_width, h, 4,
           [&](int x, int y, int c) { return static_cast<double>(img.pixel(x, y)[c]); },
           out.data());
  return RasterImage(target_width, h, std::move(out));
}

}  // namespace sketchanim
