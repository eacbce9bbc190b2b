#include "synth.hpp"

#include "sketchanim/arap.hpp"
#include "sketchanim/error.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace sketchanim;

namespace {

// nx x ny vertex grid with spacing h, two positively oriented triangles per cell.
CharacterMesh grid(int nx, int ny, double h = 10.0) {
  CharacterMesh m;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.vertices.emplace_back(i * h, j * h);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i, b = a + 1, c = a + nx + 1, d = a + nx;
      m.triangles.push_back({a, b, c});
      m.triangles.push_back({a, c, d});
    }
  m.uvs = m.vertices;
  m.groups.assign(m.triangles.size(), BodyGroup::trunk);
  return m;
}

CharacterMesh single_triangle() {
  CharacterMesh m;
  m.vertices = {{0, 0}, {30, 0}, {10, 20}};
  m.triangles = {{0, 1, 2}};
  m.uvs = m.vertices;
  m.groups = {BodyGroup::trunk};
  return m;
}

struct Case {
  const char* name;
  CharacterMesh mesh;
  std::vector<int> handles;
};

std::vector<Case> cases() {
  return {
      {"1 triangle", single_triangle(), {0, 1}},
      {"50 vertices", grid(10, 5), {0, 9, 45, 22}},
      {"500 vertices", grid(25, 20), {0, 24, 475, 499, 262}},
  };
}

Point2 centroid(const std::vector<Point2>& v) {
  Point2 c = Point2::Zero();
  for (const Point2& p : v) c += p;
  return c / static_cast<double>(v.size());
}

double max_error(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, (a[i] - b[i]).norm());
  return e;
}

template <class F>
std::vector<Point2> map(const std::vector<Point2>& v, F f) {
  std::vector<Point2> out;
  for (const Point2& p : v) out.push_back(f(p));
  return out;
}

std::vector<Point2> pick(const std::vector<Point2>& v, const std::vector<int>& idx) {
  std::vector<Point2> out;
  for (int i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

TEST_CASE("closed-form rigid motions are reproduced") {
  for (const Case& c : cases()) {
    CAPTURE(c.name);
    const ArapSolver solver(c.mesh, c.handles);
    const auto& rest = c.mesh.vertices;

    CHECK(max_error(solver.solve(pick(rest, c.handles)), rest) <= 1e-6);

    const Point2 t(13.5, -7.25);
    const auto moved = map(rest, [&](const Point2& p) { return Point2(p + t); });
    CHECK(max_error(solver.solve(pick(moved, c.handles)), moved) <= 1e-6);

    const Point2 ctr = centroid(rest);
    const auto turned = map(rest, [&](const Point2& p) {
      const Point2 d = p - ctr;
      return Point2(ctr + Point2(-d.y(), d.x()));
    });
    CHECK(max_error(solver.solve(pick(turned, c.handles)), turned) <= 1e-4);
  }
}

TEST_CASE("doubling handle spread scales triangles by less than two") {
  for (const Case& c : cases()) {
    if (c.mesh.triangle_count() < 2) continue;
    CAPTURE(c.name);
    const ArapSolver solver(c.mesh, c.handles);
    const auto& rest = c.mesh.vertices;
    const Point2 ctr = centroid(rest);
    const auto targets = map(pick(rest, c.handles), [&](const Point2& p) { return Point2(ctr + 2 * (p - ctr)); });
    const auto out = solver.solve(targets);
    double mean = 0;
    for (const auto& t : c.mesh.triangles) {
      const double a0 = orient2d(rest[t[0]], rest[t[1]], rest[t[2]]);
      const double a1 = orient2d(out[t[0]], out[t[1]], out[t[2]]);
      mean += std::sqrt(std::abs(a1 / a0));
    }
    mean /= static_cast<double>(c.mesh.triangle_count());
    CHECK(mean > 1.0);
    CHECK(mean < 2.0);
  }
}

TEST_CASE("one factorisation serves repeated solves") {
  const CharacterMesh m = grid(10, 10);
  const std::vector<int> handles{0, 9, 90, 99, 55};
  const ArapSolver shared(m, handles);
  for (int k = 0; k < 3; ++k) {
    std::vector<Point2> targets = pick(m.vertices, handles);
    targets[4] += Point2(5.0 * k, -3.0 * k);
    targets[1] += Point2(0, 4.0 * k);
    const ArapSolver fresh(m, handles);
    CHECK(max_error(shared.solve(targets), fresh.solve(targets)) < 1e-12);
  }
  const auto detailed = shared.solve_detailed(pick(m.vertices, handles));
  CHECK(detailed.similarity.size() == m.vertex_count());
  CHECK(max_error(detailed.similarity, m.vertices) < 1e-6);
}

TEST_CASE("solver input validation") {
  CharacterMesh two;
  two.vertices = {{0, 0}, {10, 0}, {0, 10}, {50, 50}, {60, 50}, {50, 60}};
  two.triangles = {{0, 1, 2}, {3, 4, 5}};
  try {
    ArapSolver s(two, {0, 3});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::disconnected_mesh);
  }
  const CharacterMesh g = grid(4, 4);
  CHECK_THROWS_AS(ArapSolver(g, {0}), Error);
  CHECK_THROWS_AS(ArapSolver(g, {0, 0}), Error);
  CHECK_THROWS_AS(ArapSolver(g, {0, 99}), Error);
  const ArapSolver s(g, {0, 15});
  try {
    s.solve(std::vector<Point2>{{0, 0}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_handle);
  }
}

TEST_CASE("handle binding") {
  const auto fig = fixtures::make_figure({});
  const Skeleton skel = build_skeleton(fig.joints);
  const CharacterMesh m = grid(41, 53);

  SUBCASE("each joint takes its nearest vertex") {
    const HandleSet h = bind_handles(m, skel);
    REQUIRE(h.size() == kSkelJointCount);
    for (std::size_t k = 0; k < h.size(); ++k) {
      const Point2 p = skel.joint(h.joints[k]);
      double best = 1e300;
      for (const Point2& v : m.vertices) best = std::min(best, (v - p).norm());
      CHECK((m.vertices[h.vertices[k]] - p).norm() == doctest::Approx(best));
    }
  }
  SUBCASE("a shared nearest vertex goes to the first joint") {
    Skeleton s = skel;
    s.joints[static_cast<int>(SkelJoint::left_wrist)] = Point2(101, 101);
    s.joints[static_cast<int>(SkelJoint::right_wrist)] = Point2(102, 102);
    const HandleSet h = bind_handles(m, s);
    int lw = -1, rw = -1;
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (h.joints[k] == SkelJoint::left_wrist) lw = h.vertices[k];
      if (h.joints[k] == SkelJoint::right_wrist) rw = h.vertices[k];
    }
    CHECK(m.vertices[lw] == Point2(100, 100));
    CHECK(rw != lw);
    CHECK((m.vertices[rw] - Point2(102, 102)).norm() == doctest::Approx(std::hypot(8.0, 2.0)));
  }
  SUBCASE("far joints fail or are skipped") {
    Skeleton s = skel;
    s.joints[static_cast<int>(SkelJoint::nose)] = Point2(2000, 2000);
    try {
      bind_handles(m, s);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unbindable_joint);
      CHECK(std::string(e.what()).find("nose") != std::string::npos);
    }
    BindOptions o;
    o.exclude_unbindable = true;
    const HandleSet h = bind_handles(m, s, o);
    CHECK(h.size() == kSkelJointCount - 1);
    CHECK(h.warnings.size() == 1);
  }
  SUBCASE("excluded joints are left out") {
    BindOptions o;
    o.excluded = {SkelJoint::left_wrist, SkelJoint::nose};
    const HandleSet h = bind_handles(m, skel, o);
    CHECK(h.size() == kSkelJointCount - 2);
  }
  SUBCASE("rest-pose targets are the handle vertices") {
    const HandleSet h = bind_handles(m, skel);
    SkeletonPose rest{};
    std::copy(skel.joints.begin(), skel.joints.end(), rest.begin());
    const auto targets = handle_targets(h, m, skel, rest);
    for (std::size_t k = 0; k < h.size(); ++k) CHECK((targets[k] - m.vertices[h.vertices[k]]).norm() < 1e-12);
    // A rigid turn of the whole skeleton turns the offsets with it.
    const Eigen::Rotation2Dd R(0.8);
    const Point2 o = skel.joint(SkelJoint::root);
    SkeletonPose turned{};
    for (int j = 0; j < kSkelJointCount; ++j) turned[j] = o + R * (skel.joints[j] - o);
    const auto moved = handle_targets(h, m, skel, turned);
    for (std::size_t k = 0; k < h.size(); ++k)
      CHECK((moved[k] - (o + R * (m.vertices[h.vertices[k]] - o))).norm() < 1e-9);
  }
  SUBCASE("named targets must cover every handle") {
    const HandleSet h = bind_handles(m, skel);
    const ArapSolver solver = build_solver(m, h);
    std::map<SkelJoint, Point2> targets;
    for (std::size_t k = 0; k < h.size(); ++k) targets[h.joints[k]] = m.vertices[h.vertices[k]];
    CHECK(max_error(solve(solver, h, targets), m.vertices) < 1e-6);
    targets.erase(SkelJoint::chest);
    try {
      solve(solver, h, targets);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::missing_handle);
      CHECK(std::string(e.what()).find("chest") != std::string::npos);
    }
  }
}

TEST_CASE("per-frame solves at 1000 vertices stay under 50 ms") {
  const CharacterMesh m = grid(40, 25);
  REQUIRE(m.vertex_count() == 1000);
  const std::vector<int> handles{0, 39, 960, 999, 500, 520};
  const ArapSolver solver(m, handles);
  const auto rest = pick(m.vertices, handles);
  double worst = 0;
  for (int f = 0; f < 60; ++f) {
    std::vector<Point2> targets = rest;
    targets[4] += 20 * Point2(std::cos(0.1 * f), std::sin(0.1 * f));
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = solver.solve(targets);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    worst = std::max(worst, ms);
    REQUIRE(out.size() == 1000);
  }
  MESSAGE("worst solve " << worst << " ms");
  CHECK(worst < 50.0);
}
