#include "sketchanim/render.hpp"

#include "sketchanim/error.hpp"
#include "sketchanim/gif.hpp"
#include "sketchanim/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sketchanim {

namespace {

constexpr int kMaxViewportSide = 8192;

// Pixel centres lying exactly on an edge belong to the triangle only when the
// edge is a top or left edge (positive orientation, y down).
bool owns_edge(const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  return d.y() < 0 || (d.y() == 0 && d.x() > 0);
}

void blend(std::uint8_t* dst, const std::uint8_t* src) {
  if (src[3] == 255) {
    std::copy(src, src + 4, dst);
    return;
  }
  if (src[3] == 0) return;
  const double a = src[3] / 255.0;
  const double da = dst[3] / 255.0;
  const double out_a = a + da * (1 - a);
  for (int c = 0; c < 3; ++c) {
    const double v = (src[c] * a + dst[c] * da * (1 - a)) / out_a;
    dst[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  dst[3] = static_cast<std::uint8_t>(std::clamp(std::lround(out_a * 255), 0L, 255L));
}

}  // namespace

void Viewport::validate() const {
  if (width <= 0 || height <= 0 || width > kMaxViewportSide || height > kMaxViewportSide)
    throw Error(ErrorKind::validation, "viewport dimensions out of range");
  if (!std::isfinite(scale) || scale <= 0 || !translation.allFinite())
    throw Error(ErrorKind::validation, "viewport transform must be finite and positive");
}

Viewport fit_viewport(int texture_width, int texture_height,
                      const std::vector<std::vector<Point2>>& frames, bool transparent) {
  Point2 lo(0, 0), hi(texture_width, texture_height);
  for (const auto& frame : frames)
    for (const Point2& v : frame) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  const double x0 = std::floor(lo.x()), y0 = std::floor(lo.y());
  const double x1 = std::ceil(hi.x()), y1 = std::ceil(hi.y());
  Viewport vp;
  vp.width = static_cast<int>(std::min<double>(x1 - x0, kMaxViewportSide));
  vp.height = static_cast<int>(std::min<double>(y1 - y0, kMaxViewportSide));
  vp.translation = Point2(-x0, -y0);
  if (transparent) vp.background = {255, 255, 255, 0};
  vp.validate();
  return vp;
}

RasterImage rasterize_frame(const CharacterMesh& mesh, std::span<const Point2> deformed,
                            const RasterImage& texture, const RenderOrder& order,
                            const Viewport& vp) {
  vp.validate();
  if (deformed.size() != mesh.vertices.size())
    throw Error(ErrorKind::validation, "deformed vertex count does not match the mesh");
  if (mesh.groups.size() != mesh.triangles.size())
    throw Error(ErrorKind::validation, "mesh is missing body-group labels");
  RasterImage out(vp.width, vp.height);
  for (int y = 0; y < vp.height; ++y)
    for (int x = 0; x < vp.width; ++x)
      std::copy(vp.background.begin(), vp.background.end(), out.pixel(x, y));
  if (mesh.triangles.empty() || texture.empty()) return out;

  const int tw = texture.width(), th = texture.height();
  for (BodyGroup group : order) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.groups[t] != group) continue;
      std::array<int, 3> idx = mesh.triangles[t];
      std::array<Point2, 3> s = {vp.to_screen(deformed[idx[0]]), vp.to_screen(deformed[idx[1]]),
                                 vp.to_screen(deformed[idx[2]])};
      double area2 = orient2d(s[0], s[1], s[2]);
      if (area2 == 0.0 || !std::isfinite(area2)) continue;
      if (area2 < 0) {
        // Inverted by the deformation: draw it with its winding restored.
        std::swap(s[1], s[2]);
        std::swap(idx[1], idx[2]);
        area2 = -area2;
      }
      const bool own0 = owns_edge(s[1], s[2]);
      const bool own1 = owns_edge(s[2], s[0]);
      const bool own2 = owns_edge(s[0], s[1]);
      const int x0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].x(), s[1].x(), s[2].x()}))));
      const int y0 = std::max(0, static_cast<int>(std::floor(std::min({s[0].y(), s[1].y(), s[2].y()}))));
      const int x1 = std::min(vp.width - 1, static_cast<int>(std::ceil(std::max({s[0].x(), s[1].x(), s[2].x()}))));
      const int y1 = std::min(vp.height - 1, static_cast<int>(std::ceil(std::max({s[0].y(), s[1].y(), s[2].y()}))));
      const Point2& uv0 = mesh.uvs[idx[0]];
      const Point2& uv1 = mesh.uvs[idx[1]];
      const Point2& uv2 = mesh.uvs[idx[2]];
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const Point2 p(x + 0.5, y + 0.5);
          const double w0 = orient2d(s[1], s[2], p);
          const double w1 = orient2d(s[2], s[0], p);
          const double w2 = orient2d(s[0], s[1], p);
          if (w0 < 0 || w1 < 0 || w2 < 0) continue;
          if ((w0 == 0 && !own0) || (w1 == 0 && !own1) || (w2 == 0 && !own2)) continue;
          const Point2 uv = (w0 * uv0 + w1 * uv1 + w2 * uv2) / area2;
          const double u = std::clamp(uv.x(), 0.0, 1.0);
          const double v = std::clamp(uv.y(), 0.0, 1.0);
          const int tx = std::clamp(static_cast<int>(std::floor(u * tw)), 0, tw - 1);
          const int ty = std::clamp(static_cast<int>(std::floor(v * th)), 0, th - 1);
          blend(out.pixel(x, y), texture.pixel(tx, ty));
        }
      }
    }
  }
  return out;
}

void AnimationOutput::validate() const {
  if (frames.empty()) throw Error(ErrorKind::validation, "animation has no frames");
  for (const RasterImage& f : frames)
    if (f.width() != frames[0].width() || f.height() != frames[0].height())
      throw Error(ErrorKind::validation, "animation frames differ in size");
}

std::vector<std::filesystem::path> export_png_sequence(const AnimationOutput& out,
                                                       const std::filesystem::path& dir) {
  out.validate();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.png", i);
    const auto path = dir / name;
    write_file(path, encode_png(out.frames[i]));
    files.push_back(path);
  }
  return files;
}

void export_gif(const AnimationOutput& out, const std::filesystem::path& path) {
  out.validate();
  write_file(path, encode_gif(out.frames, out.frame_time));
}

}  // namespace sketchanim
