#pragma once

#include <cstdint>
#include <vector>

namespace sketchanim {

/// Row-major RGBA8 image.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, std::uint8_t fill = 0);
  RasterImage(int width, int height, std::vector<std::uint8_t> rgba);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return width_ == 0 || height_ == 0; }

  std::uint8_t* pixel(int x, int y) { return &pixels_[offset(x, y)]; }
  const std::uint8_t* pixel(int x, int y) const { return &pixels_[offset(x, y)]; }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a = 255);

  const std::vector<std::uint8_t>& data() const noexcept { return pixels_; }
  std::vector<std::uint8_t>& data() noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 4;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Row-major 8-bit intensity image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  const std::vector<std::uint8_t>& data() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Intersection of `box` with the image rectangle; w or h is zero when empty.
BBox clip_box(const BBox& box, int width, int height);
BBox union_box(const BBox& a, const BBox& b);

/// ITU-R BT.601 luma, rounded to nearest.
GrayImage to_grayscale(const RasterImage& img);

/// Crops to the part of `box` that overlaps the image. Throws invalid_box when
/// nothing overlaps.
RasterImage crop(const RasterImage& img, const BBox& box);

/// Bilinear resize with half-pixel-centre sampling; height follows the aspect
/// ratio, rounded, at least 1.
GrayImage resize_to_width(const GrayImage& img, int target_width);
RasterImage resize_to_width(const RasterImage& img, int target_width);

}  // namespace sketchanim
