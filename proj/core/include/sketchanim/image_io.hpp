#pragma once

#include "sketchanim/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sketchanim {

using Bytes = std::vector<std::uint8_t>;

/// Decodes a PNG or JPEG stream, sniffed from the signature. Missing alpha is
/// filled as opaque. Throws ErrorKind::decode.
RasterImage decode_image(std::span<const std::uint8_t> bytes);

/// Non-interlaced 8-bit PNG.
Bytes encode_png(const RasterImage& img);
Bytes encode_png(const GrayImage& img);

/// Single-channel PNGs decode to their gray values; colour PNGs go through luma.
GrayImage decode_gray_png(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

inline RasterImage load_image(const std::filesystem::path& path) {
  return decode_image(read_file(path));
}

}  // namespace sketchanim
