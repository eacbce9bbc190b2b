#include "sketchanim/error.hpp"
#include "sketchanim/gif.hpp"

#include <doctest.h>

#include <random>

using namespace sketchanim;

namespace {

RasterImage stripes(int w, int h, int phase) {
  RasterImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int k = (x + y + phase) % 5;
      img.set(x, y, static_cast<std::uint8_t>(k * 60), static_cast<std::uint8_t>(255 - k * 40), 17);
    }
  return img;
}

}  // namespace

TEST_CASE("frame delays in centiseconds") {
  CHECK(gif_delay_cs(1.0 / 30.0) == 3);
  CHECK(gif_delay_cs(0.1) == 10);
  CHECK(gif_delay_cs(0.001) == 2);
  CHECK(gif_delay_cs(0.125) == 13);
}

TEST_CASE("few-colour animations round-trip exactly") {
  std::vector<RasterImage> frames{stripes(37, 23, 0), stripes(37, 23, 1), stripes(37, 23, 2)};
  const Bytes gif = encode_gif(frames, 1.0 / 30.0);
  CHECK(std::string(gif.begin(), gif.begin() + 6) == "GIF89a");
  CHECK(gif.back() == 0x3b);
  const DecodedGif d = decode_gif(gif);
  CHECK(d.width == 37);
  CHECK(d.height == 23);
  CHECK(d.loops);
  REQUIRE(d.frames.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d.frames[i] == frames[i]);
    CHECK(d.delays_cs[i] == 3);
  }
}

TEST_CASE("single frame and transparency") {
  RasterImage img(4, 4, 0);  // all transparent black
  img.set(1, 1, 200, 10, 10);
  const DecodedGif d = decode_gif(encode_gif(std::vector<RasterImage>{img}, 0.5));
  REQUIRE(d.frames.size() == 1);
  CHECK(d.delays_cs[0] == 50);
  CHECK(d.frames[0].pixel(0, 0)[3] == 0);
  CHECK(d.frames[0].pixel(1, 1)[0] == 200);
  CHECK(d.frames[0].pixel(1, 1)[3] == 255);
}

TEST_CASE("median cut keeps at most the requested colours") {
  std::mt19937 rng(1);
  std::uniform_int_distribution<int> v(0, 255);
  RasterImage noisy(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      noisy.set(x, y, static_cast<std::uint8_t>(v(rng)), static_cast<std::uint8_t>(v(rng)),
                static_cast<std::uint8_t>(v(rng)));
  const std::vector<RasterImage> frames{noisy};
  const auto palette = median_cut_palette(frames, 256);
  CHECK(palette.size() <= 256);
  CHECK(palette.size() > 128);
  CHECK(median_cut_palette(frames, 256) == palette);
  CHECK(median_cut_palette(frames, 4).size() <= 4);
  const DecodedGif d = decode_gif(encode_gif(frames, 0.04));
  REQUIRE(d.frames.size() == 1);
  // Quantisation error stays bounded for uniform noise.
  double err = 0;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      for (int c = 0; c < 3; ++c) err += std::abs(d.frames[0].pixel(x, y)[c] - noisy.pixel(x, y)[c]);
  CHECK(err / (64 * 64 * 3) < 24.0);
}

TEST_CASE("encoding is deterministic") {
  std::vector<RasterImage> frames{stripes(20, 20, 0), stripes(20, 20, 3)};
  CHECK(encode_gif(frames, 0.05) == encode_gif(frames, 0.05));
}

TEST_CASE("large frames exercise code-table resets") {
  RasterImage img(300, 200);
  for (int y = 0; y < 200; ++y)
    for (int x = 0; x < 300; ++x)
      img.set(x, y, static_cast<std::uint8_t>((x * 7) % 16 * 16), static_cast<std::uint8_t>((y * 3) % 16 * 16), 0);
  const DecodedGif d = decode_gif(encode_gif(std::vector<RasterImage>{img}, 0.1));
  CHECK(d.frames[0] == img);
}

TEST_CASE("truncated streams name an offset") {
  const Bytes gif = encode_gif(std::vector<RasterImage>{stripes(10, 10, 0)}, 0.1);
  const Bytes cut(gif.begin(), gif.begin() + static_cast<long>(gif.size() / 2));
  try {
    decode_gif(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::decode);
    CHECK(std::string(e.what()).find("offset") != std::string::npos);
  }
  CHECK_THROWS_AS(decode_gif(Bytes{'G', 'I', 'F'}), Error);
  CHECK_THROWS_AS(encode_gif(std::vector<RasterImage>{}, 0.1), Error);
}
