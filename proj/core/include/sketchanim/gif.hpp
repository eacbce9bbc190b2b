#pragma once

#include "sketchanim/image_io.hpp"
#include "sketchanim/raster.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sketchanim {

/// Delay in centiseconds for a frame time in seconds: rounded, at least 2.
int gif_delay_cs(double frame_time);

/// At most `max_colors` RGB entries by median cut over the opaque pixels of
/// all frames. Deterministic: no sampling, ties broken by box order.
std::vector<std::array<std::uint8_t, 3>> median_cut_palette(std::span<const RasterImage> frames,
                                                           int max_colors);

/// Animated GIF89a with a global palette and the NETSCAPE2.0 infinite-loop
/// extension. Fully transparent pixels map to a reserved transparent index.
Bytes encode_gif(std::span<const RasterImage> frames, double frame_time);

struct DecodedGif {
  int width = 0;
  int height = 0;
  bool loops = false;
  std::vector<RasterImage> frames;
  std::vector<int> delays_cs;
};

/// Minimal decoder (global/local palettes, transparency, interlace).
DecodedGif decode_gif(std::span<const std::uint8_t> bytes);

}  // namespace sketchanim
