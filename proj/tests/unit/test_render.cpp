#include "oracles.hpp"
#include "synth.hpp"

#include "sketchanim/contour.hpp"
#include "sketchanim/error.hpp"
#include "sketchanim/image_io.hpp"
#include "sketchanim/render.hpp"

#include <doctest.h>

#include <filesystem>

using namespace sketchanim;

namespace {

// Two triangles with their own vertices; each samples one flat texel.
CharacterMesh two_flat_triangles(std::array<Point2, 3> a, std::array<Point2, 3> b, BodyGroup ga,
                                 BodyGroup gb) {
  CharacterMesh m;
  for (const Point2& p : a) m.vertices.push_back(p), m.uvs.emplace_back(0.25, 0.5);
  for (const Point2& p : b) m.vertices.push_back(p), m.uvs.emplace_back(0.75, 0.5);
  m.triangles = {{0, 1, 2}, {3, 4, 5}};
  m.groups = {ga, gb};
  return m;
}

RasterImage red_blue() {
  RasterImage t(2, 1);
  t.set(0, 0, 255, 0, 0);
  t.set(1, 0, 0, 0, 255);
  return t;
}

Viewport plain(int w, int h) {
  Viewport vp;
  vp.width = w;
  vp.height = h;
  return vp;
}

int count_rgb(const RasterImage& img, int r, int g, int b) {
  int n = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto* p = img.pixel(x, y);
      n += p[0] == r && p[1] == g && p[2] == b;
    }
  return n;
}

}  // namespace

TEST_CASE("top-left rule: edges through pixel centres are drawn exactly once") {
  // Square from (0.5, 0.5) to (4.5, 4.5); every edge passes through centres.
  const CharacterMesh m = two_flat_triangles({Point2(0.5, 0.5), Point2(4.5, 0.5), Point2(4.5, 4.5)},
                                             {Point2(0.5, 0.5), Point2(4.5, 4.5), Point2(0.5, 4.5)},
                                             BodyGroup::trunk, BodyGroup::left_upper_arm);
  const RasterImage tex = red_blue();
  const RenderOrder order = default_render_order();
  const RasterImage both = rasterize_frame(m, m.vertices, tex, order, plain(6, 6));
  CHECK(count_rgb(both, 255, 0, 0) + count_rgb(both, 0, 0, 255) == 16);
  // Drawn alone, the two halves must not overlap.
  CharacterMesh only_a = m, only_b = m;
  only_a.triangles = {m.triangles[0]};
  only_a.groups = {m.groups[0]};
  only_b.triangles = {m.triangles[1]};
  only_b.groups = {m.groups[1]};
  const RasterImage ra = rasterize_frame(only_a, m.vertices, tex, order, plain(6, 6));
  const RasterImage rb = rasterize_frame(only_b, m.vertices, tex, order, plain(6, 6));
  int overlap = 0, covered = 0;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) {
      const bool a = ra.pixel(x, y)[1] == 0;
      const bool b = rb.pixel(x, y)[1] == 0;
      overlap += a && b;
      covered += a || b;
      if (a || b) {
        CHECK(x <= 3);
        CHECK(y <= 3);
      }
    }
  CHECK(overlap == 0);
  CHECK(covered == 16);
  // Diagonal centres are on A's right edge and B's left edge.
  CHECK(rb.pixel(2, 2)[2] == 255);
}

TEST_CASE("groups later in the order paint on top") {
  const std::array<Point2, 3> t1{Point2(0, 0), Point2(8, 0), Point2(0, 8)};
  const std::array<Point2, 3> t2{Point2(1, 1), Point2(8, 1), Point2(1, 8)};
  const CharacterMesh m = two_flat_triangles(t1, t2, BodyGroup::trunk, BodyGroup::left_upper_arm);
  RenderOrder order = default_render_order();
  auto pos = [&](BodyGroup g) { return std::find(order.begin(), order.end(), g); };
  std::iter_swap(pos(BodyGroup::trunk), order.begin());
  std::iter_swap(pos(BodyGroup::left_upper_arm), order.end() - 1);
  RasterImage img = rasterize_frame(m, m.vertices, red_blue(), order, plain(8, 8));
  CHECK(img.pixel(2, 2)[2] == 255);
  std::swap(*pos(BodyGroup::trunk), *pos(BodyGroup::left_upper_arm));
  img = rasterize_frame(m, m.vertices, red_blue(), order, plain(8, 8));
  CHECK(img.pixel(2, 2)[0] == 255);
  CHECK(img.pixel(0, 0)[0] == 255);
}

TEST_CASE("an empty mesh renders only the background") {
  Viewport vp = plain(5, 4);
  vp.background = {10, 20, 30, 0};
  const RasterImage img = rasterize_frame(CharacterMesh{}, {}, red_blue(), default_render_order(), vp);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) CHECK(std::equal(vp.background.begin(), vp.background.end(), img.pixel(x, y)));
}

TEST_CASE("inverted triangles are still drawn") {
  const CharacterMesh m = two_flat_triangles({Point2(0, 0), Point2(4, 0), Point2(0, 4)},
                                             {Point2(10, 10), Point2(11, 10), Point2(10, 11)},
                                             BodyGroup::trunk, BodyGroup::trunk);
  std::vector<Point2> flipped = m.vertices;
  for (int i = 0; i < 3; ++i) flipped[i].x() = 4 - flipped[i].x();
  const RasterImage img = rasterize_frame(m, flipped, red_blue(), default_render_order(), plain(6, 6));
  CHECK(count_rgb(img, 255, 0, 0) > 0);
}

TEST_CASE("the rest pose reproduces the masked drawing") {
  const auto fig = fixtures::make_figure({});
  const BinaryMask mask = extract_mask(to_grayscale(fig.image));
  CharacterMesh mesh = triangulate(trace_contour(mask), mask);
  mesh = assign_groups(mesh, build_skeleton(fig.joints));
  const RasterImage img = rasterize_frame(mesh, mesh.vertices, fig.image, default_render_order(),
                                          plain(mask.width(), mask.height()));
  const BinaryMask inner = oracle::erode(mask, 3);
  std::size_t agree = 0;
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      if (inner.at(x, y)) agree += std::equal(img.pixel(x, y), img.pixel(x, y) + 4, fig.image.pixel(x, y));
  CHECK(static_cast<double>(agree) >= 0.995 * static_cast<double>(inner.count()));
}

TEST_CASE("viewport fitting covers texture and posed vertices") {
  const Viewport vp = fit_viewport(100, 50, {{Point2(-10.5, 3), Point2(120.2, 60.1)}}, true);
  CHECK(vp.width == 132);
  CHECK(vp.height == 61);
  CHECK(vp.translation == Point2(11, 0));
  CHECK(vp.background[3] == 0);
  Viewport bad = plain(0, 10);
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("PNG sequences") {
  AnimationOutput out;
  out.frames = {RasterImage(3, 2, 255), RasterImage(3, 2, 0)};
  const auto dir = std::filesystem::temp_directory_path() / "sketchanim_render_test";
  std::filesystem::remove_all(dir);
  const auto files = export_png_sequence(out, dir);
  REQUIRE(files.size() == 2);
  CHECK(files[1].filename() == "frame_0001.png");
  CHECK(load_image(files[1]) == out.frames[1]);
  out.frames.push_back(RasterImage(4, 2));
  CHECK_THROWS_AS(out.validate(), Error);
  std::filesystem::remove_all(dir);
}
