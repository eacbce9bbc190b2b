#pragma once

#include "sketchanim/raster.hpp"

#include <cstdint>
#include <vector>

namespace sketchanim {

/// Row-major foreground flags (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool on) { bits_[index(x, y)] = on ? 1 : 0; }
  /// Out-of-bounds reads are background.
  bool get(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_ && at(x, y);
  }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class Polarity { dark_on_light, light_on_dark };

struct SegmentParams {
  int target_width = 400;
  int block_radius = 8;
  double c = 115.0;
  int kernel_size = 3;
  int connectivity = 8;
  Polarity polarity = Polarity::dark_on_light;

  void validate() const;
};

/// Gaussian-weighted local-mean threshold over a (2r+1)^2 window with border
/// replication; foreground when intensity < mean - c (or > mean + c for
/// light-on-dark inputs).
BinaryMask adaptive_threshold(const GrayImage& img, const SegmentParams& params);

BinaryMask morph_dilate(const BinaryMask& m, int kernel_size);
BinaryMask morph_erode(const BinaryMask& m, int kernel_size);
/// Dilate then erode; pixels outside the raster count as background.
BinaryMask morph_close(const BinaryMask& m, int kernel_size);

/// Floods background (4-connected) from the border; everything unreached
/// becomes foreground.
BinaryMask fill_holes(const BinaryMask& m);

/// Per-pixel component labels (0 = background, components numbered from 1 in
/// row-major order of their first pixel) and the area of each.
struct Components {
  std::vector<int> labels;
  std::vector<std::size_t> areas;  // areas[k] is the area of label k + 1
};
Components label_components(const BinaryMask& m, int connectivity);

/// Keeps the maximum-area component; ties go to the component holding the
/// earliest row-major pixel. Throws empty_mask.
BinaryMask largest_component(const BinaryMask& m, int connectivity = 8);

/// resize -> threshold -> close -> dilate -> fill -> largest.
BinaryMask extract_mask(const GrayImage& img, const SegmentParams& params = {});

/// Rules re-run after a manual edit: fill holes, keep the largest component.
BinaryMask reapply_fill_rules(const BinaryMask& m, int connectivity = 8);

/// Stamps discs of `radius` along a polyline, setting pixels to `value`.
void stamp_stroke(BinaryMask& m, const std::vector<std::pair<double, double>>& points,
                  double radius, bool value);

/// Mask <-> 0/255 gray raster.
GrayImage mask_to_gray(const BinaryMask& m);
BinaryMask gray_to_mask(const GrayImage& g);

/// Tight box around the foreground; zero-sized when empty.
BBox foreground_bbox(const BinaryMask& m);

}  // namespace sketchanim
