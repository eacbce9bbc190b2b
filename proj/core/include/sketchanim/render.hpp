#pragma once

#include "sketchanim/geometry.hpp"
#include "sketchanim/mesh.hpp"
#include "sketchanim/raster.hpp"
#include "sketchanim/rig.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sketchanim {

struct Viewport {
  int width = 0;
  int height = 0;
  double scale = 1.0;
  Point2 translation = Point2::Zero();
  std::array<std::uint8_t, 4> background{255, 255, 255, 255};

  Point2 to_screen(const Point2& p) const { return scale * p + translation; }
  void validate() const;
};

/// Smallest integer viewport holding the texture rectangle and every posed
/// vertex; `transparent` sets the background alpha to zero.
Viewport fit_viewport(int texture_width, int texture_height,
                      const std::vector<std::vector<Point2>>& frames, bool transparent = false);

/// Draws triangles group by group in `order` (later on top), within a group
/// in triangle index order. Pixel centres are tested with a top-left fill
/// rule; UVs are interpolated barycentrically and sampled nearest-neighbour.
RasterImage rasterize_frame(const CharacterMesh& mesh, std::span<const Point2> deformed,
                            const RasterImage& texture, const RenderOrder& order,
                            const Viewport& viewport);

struct AnimationOutput {
  std::vector<RasterImage> frames;
  double frame_time = 1.0 / 30.0;

  void validate() const;
};

/// frame_0000.png, frame_0001.png, ... in `dir` (created if missing).
std::vector<std::filesystem::path> export_png_sequence(const AnimationOutput& out,
                                                       const std::filesystem::path& dir);

/// Looping GIF89a; see encode_gif.
void export_gif(const AnimationOutput& out, const std::filesystem::path& path);

}  // namespace sketchanim
