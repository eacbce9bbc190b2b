#include "sketchanim/error.hpp"
#include "sketchanim/raster.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace sketchanim;

namespace {

RasterImage pattern(int w, int h) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set(x, y, static_cast<std::uint8_t>(x * 20), static_cast<std::uint8_t>(y * 20),
              static_cast<std::uint8_t>(x + y), 255);
  return img;
}

}  // namespace

TEST_CASE("grayscale uses rounded BT.601 luma") {
  RasterImage img(3, 1);
  img.set(0, 0, 255, 255, 255);
  img.set(1, 0, 255, 0, 0);
  img.set(2, 0, 0, 0, 255);
  const GrayImage g = to_grayscale(img);
  CHECK(g.at(0, 0) == 255);
  CHECK(g.at(1, 0) == 76);
  CHECK(g.at(2, 0) == 29);
}

TEST_CASE("grayscale is within one level of real luma") {
  RasterImage img(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      img.set(x, y, static_cast<std::uint8_t>(x * 17), static_cast<std::uint8_t>(y * 13),
              static_cast<std::uint8_t>((x * y) % 256));
  const GrayImage g = to_grayscale(img);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const auto* p = img.pixel(x, y);
      const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
      CHECK(std::abs(g.at(x, y) - luma) <= 0.5 + 1e-9);
    }
}

TEST_CASE("crop") {
  const RasterImage img = pattern(10, 10);
  SUBCASE("full box is identity") { CHECK(crop(img, {0, 0, 10, 10}) == img); }
  SUBCASE("inner box indexes directly") {
    const RasterImage c = crop(img, {2, 2, 4, 4});
    REQUIRE(c.width() == 4);
    REQUIRE(c.height() == 4);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        for (int k = 0; k < 4; ++k) CHECK(c.pixel(x, y)[k] == img.pixel(x + 2, y + 2)[k]);
  }
  SUBCASE("half outside is clipped") {
    // Overlap of [7, 13) x [-3, 5) with [0, 10) x [0, 10) is [7, 10) x [0, 5).
    const RasterImage c = crop(img, {7, -3, 6, 8});
    CHECK(c.width() == 3);
    CHECK(c.height() == 5);
    CHECK(c.pixel(0, 0)[0] == img.pixel(7, 0)[0]);
  }
  SUBCASE("no overlap throws") {
    CHECK_THROWS_AS(crop(img, {20, 20, 3, 3}), Error);
    try {
      crop(img, {-5, 0, 5, 5});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_box);
    }
  }
}

TEST_CASE("box helpers") {
  CHECK(clip_box({-2, -2, 5, 5}, 10, 10) == BBox{0, 0, 3, 3});
  CHECK(union_box({0, 0, 2, 2}, {5, 6, 1, 1}) == BBox{0, 0, 6, 7});
}

TEST_CASE("resize to width") {
  SUBCASE("same width is identity") {
    GrayImage g(400, 7);
    for (int x = 0; x < 400; ++x) g.at(x, 3) = static_cast<std::uint8_t>(x % 256);
    CHECK(resize_to_width(g, 400) == g);
  }
  SUBCASE("800x600 halves") {
    const GrayImage g(800, 600, 10);
    const GrayImage r = resize_to_width(g, 400);
    CHECK(r.width() == 400);
    CHECK(r.height() == 300);
    CHECK(r.at(123, 45) == 10);
  }
  SUBCASE("checkerboard upscale matches the bilinear formula") {
    GrayImage g(2, 2, std::vector<std::uint8_t>{0, 255, 255, 0});
    const GrayImage r = resize_to_width(g, 4);
    REQUIRE(r.width() == 4);
    REQUIRE(r.height() == 4);
    // Half-pixel centres: output i samples source (i + 0.5) / 2 - 0.5, clamped.
    auto src = [](int i) { return std::clamp((i + 0.5) / 2.0 - 0.5, 0.0, 1.0); };
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) {
        const double u = src(x), v = src(y);
        const double expect = (1 - u) * (1 - v) * 0 + u * (1 - v) * 255 + (1 - u) * v * 255 + u * v * 0;
        CHECK(std::abs(r.at(x, y) - expect) <= 0.5 + 1e-9);
        CHECK(r.at(x, y) <= 255);
      }
    // Monotone along the first row and column.
    for (int x = 1; x < 4; ++x) CHECK(r.at(x, 0) >= r.at(x - 1, 0));
    for (int y = 1; y < 4; ++y) CHECK(r.at(0, y) >= r.at(0, y - 1));
  }
  SUBCASE("colour resize keeps aspect") {
    const RasterImage r = resize_to_width(pattern(10, 7), 20);
    CHECK(r.width() == 20);
    CHECK(r.height() == 14);
  }
}
