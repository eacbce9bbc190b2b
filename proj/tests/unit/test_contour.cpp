#include "oracles.hpp"

#include "sketchanim/contour.hpp"
#include "sketchanim/error.hpp"

#include <doctest.h>

#include <random>

using namespace sketchanim;

namespace {

BinaryMask from_rows(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) m.set(x, y, rows[y][x] == '#');
  return m;
}

}  // namespace

TEST_CASE("a 3x3 block traces to its four corners") {
  const BinaryMask m = from_rows({".....", ".###.", ".###.", ".###.", "....."});
  const Polygon p = trace_contour(m);
  REQUIRE(p.vertices.size() == 4);
  CHECK(signed_area(p) == doctest::Approx(9.0));
  for (const Point2& v : p.vertices) {
    CHECK((v.x() == 1 || v.x() == 4));
    CHECK((v.y() == 1 || v.y() == 4));
  }
}

TEST_CASE("an L shape keeps its six corners") {
  const BinaryMask m = from_rows({"#...", "#...", "#...", "####"});
  const Polygon p = trace_contour(m, 0.0);
  CHECK(p.vertices.size() == 6);
  CHECK(signed_area(p) == doctest::Approx(7.0));
  CHECK(is_simple(p));
}

TEST_CASE("a single pixel is a unit square") {
  BinaryMask m(3, 3);
  m.set(1, 1, true);
  const Polygon p = trace_contour(m);
  REQUIRE(p.vertices.size() == 4);
  CHECK(signed_area(p) == doctest::Approx(1.0));
}

TEST_CASE("empty masks are rejected") {
  try {
    trace_contour(BinaryMask(4, 4));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_mask);
  }
}

TEST_CASE("unsimplified traces enclose exactly the hole-free component") {
  std::mt19937 rng(11);
  for (int i = 0; i < 40; ++i) {
    BinaryMask m = oracle::random_mask(rng, 16, 0.6);
    if (m.empty()) continue;
    m = oracle::fill(oracle::largest(m, 4));
    const Polygon p = trace_contour(m, 0.0);
    CAPTURE(i);
    CHECK(signed_area(p) > 0);
    CHECK(is_simple(p));
    CHECK(oracle::shoelace(p.vertices) == doctest::Approx(static_cast<double>(m.count())));
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        CHECK(oracle::inside(p.vertices, {x + 0.5, y + 0.5}) == m.at(x, y));
  }
}

TEST_CASE("simplified traces stay simple, positive and close to the mask") {
  std::mt19937 rng(5);
  for (int i = 0; i < 40; ++i) {
    BinaryMask m = oracle::random_mask(rng, 16, 0.55);
    if (m.empty()) continue;
    m = oracle::fill(oracle::largest(m, 8));
    const Polygon p = trace_contour(m, 1.0);
    CAPTURE(i);
    CHECK(p.vertices.size() >= 3);
    CHECK(is_simple(p));
    CHECK(signed_area(p) > 0);
    // Each simplified edge deviates at most epsilon from the raw ring, so the
    // area changes by at most epsilon times the raw perimeter.
    const Polygon raw = trace_contour(m, 0.0);
    CHECK(std::abs(signed_area(p) - signed_area(raw)) <= perimeter(raw) * 1.0 + 1e-9);
  }
}

TEST_CASE("diagonal contacts are bridged into one outline") {
  const BinaryMask m = from_rows({"##..", "##..", "..##", "..##"});
  const Polygon p = trace_contour(m, 0.0);
  CHECK(is_simple(p));
  CHECK(oracle::inside(p.vertices, {0.5, 0.5}));
  CHECK(oracle::inside(p.vertices, {3.5, 3.5}));
}

TEST_CASE("Douglas-Peucker removes collinear points") {
  Polygon ring;
  for (int i = 0; i <= 4; ++i) ring.vertices.emplace_back(i, 0);
  for (int i = 1; i <= 4; ++i) ring.vertices.emplace_back(4, i);
  for (int i = 3; i >= 0; --i) ring.vertices.emplace_back(i, 4);
  for (int i = 3; i >= 1; --i) ring.vertices.emplace_back(0, i);
  const Polygon s = simplify_closed(ring, 0.5);
  CHECK(s.vertices.size() == 4);
  CHECK(std::abs(signed_area(s)) == doctest::Approx(16.0));
}
