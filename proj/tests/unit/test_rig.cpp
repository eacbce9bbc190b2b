#include "oracles.hpp"
#include "synth.hpp"

#include "sketchanim/error.hpp"
#include "sketchanim/mesh.hpp"
#include "sketchanim/rig.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace sketchanim;

namespace {

JointSet17 sample_joints() { return fixtures::make_figure({}).joints; }

}  // namespace

TEST_CASE("root and chest are the hip and shoulder midpoints") {
  const JointSet17 j = sample_joints();
  const Skeleton s = build_skeleton(j);
  const Point2 root = (j[Keypoint::left_hip] + j[Keypoint::right_hip]) / 2;
  const Point2 chest = (j[Keypoint::left_shoulder] + j[Keypoint::right_shoulder]) / 2;
  CHECK((s.joint(SkelJoint::root) - root).norm() < 1e-12);
  CHECK((s.joint(SkelJoint::chest) - chest).norm() < 1e-12);
  CHECK(s.joint(SkelJoint::left_wrist) == j[Keypoint::left_wrist]);
}

TEST_CASE("fourteen bones, ten rotated, parents before children") {
  const Skeleton s = build_skeleton(sample_joints());
  CHECK(s.bones.size() == 14);
  std::set<RotatedBone> rotated;
  std::set<SkelJoint> reached{SkelJoint::root};
  for (const Bone& b : s.bones) {
    if (b.rotated) rotated.insert(*b.rotated);
    CHECK(reached.count(b.parent) == 1);
    reached.insert(b.child);
    CHECK(b.rest_length == doctest::Approx((s.joint(b.child) - s.joint(b.parent)).norm()));
  }
  CHECK(rotated.size() == 10);
  CHECK(reached.size() == 15);
}

TEST_CASE("spine rest length is the midpoint distance") {
  JointSet17 j = default_joint_template({0, 0, 100, 100});
  j[Keypoint::left_shoulder] = {60, 40};
  j[Keypoint::right_shoulder] = {40, 40};
  j[Keypoint::left_hip] = {55, 100};
  j[Keypoint::right_hip] = {45, 100};
  const Skeleton s = build_skeleton(j);
  CHECK(s.bone(RotatedBone::spine).rest_length == doctest::Approx(60.0));
}

TEST_CASE("a zero-length limb is reported by name") {
  JointSet17 j = sample_joints();
  j[Keypoint::left_knee] = j[Keypoint::left_hip];
  try {
    build_skeleton(j);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_rig);
    CHECK(std::string(e.what()).find("upper leg") != std::string::npos);
  }
  JointSet17 bad = sample_joints();
  bad[Keypoint::nose].x() = std::nan("");
  CHECK_THROWS_AS(build_skeleton(bad), Error);
}

TEST_CASE("nearest bone agrees with brute force") {
  const Skeleton s = build_skeleton(sample_joints());
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 400);
  for (int i = 0; i < 500; ++i) {
    const Point2 p(u(rng), u(rng) * 1.3);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t b = 0; b < s.bones.size(); ++b) {
      const double d = oracle::point_segment(p, s.joint(s.bones[b].parent), s.joint(s.bones[b].child));
      if (d < best_d) best_d = d, best = b;
    }
    CHECK(nearest_bone(s, p) == best);
  }
}

TEST_CASE("assign_groups labels every triangle by its nearest bone") {
  const auto fig = fixtures::make_figure({});
  const Skeleton s = build_skeleton(fig.joints);
  CharacterMesh m;
  m.vertices = {{200, 100}, {210, 110}, {190, 110}, {100, 300}, {104, 300}, {100, 304}};
  m.triangles = {{0, 1, 2}, {3, 4, 5}};
  m = assign_groups(m, s);
  REQUIRE(m.groups.size() == 2);
  for (std::size_t t = 0; t < 2; ++t) CHECK(m.groups[t] == s.bones[nearest_bone(s, m.centroid(t))].group);
}

TEST_CASE("joint template follows its box") {
  const JointSet17 a = default_joint_template({0, 0, 100, 200});
  const JointSet17 b = default_joint_template({30, -10, 100, 200});
  const JointSet17 c = default_joint_template({0, 0, 300, 600});
  for (int i = 0; i < kKeypointCount; ++i) {
    CHECK((b.points[i] - a.points[i] - Point2(30, -10)).norm() < 1e-12);
    CHECK((c.points[i] - 3 * a.points[i]).norm() < 1e-9);
    CHECK(a.points[i].x() >= 0);
    CHECK(a.points[i].x() <= 100);
  }
  // Character left is image +x.
  CHECK(a[Keypoint::left_shoulder].x() > a[Keypoint::right_shoulder].x());
  CHECK_NOTHROW(build_skeleton(a));
  CHECK_THROWS_AS(default_joint_template({0, 0, 0, 5}), Error);
}

TEST_CASE("render order must be a permutation") {
  const RenderOrder d = default_render_order();
  const std::vector<BodyGroup> v(d.begin(), d.end());
  CHECK(render_order(v) == d);
  std::vector<BodyGroup> dup = v;
  dup[0] = dup[1];
  CHECK_THROWS_AS(render_order(dup), Error);
  CHECK_THROWS_AS(render_order({BodyGroup::trunk}), Error);
}

TEST_CASE("name lookups round-trip") {
  for (int i = 0; i < kKeypointCount; ++i)
    CHECK(keypoint_from_string(to_string(static_cast<Keypoint>(i))) == static_cast<Keypoint>(i));
  for (int i = 0; i < kSkelJointCount; ++i)
    CHECK(skel_joint_from_string(to_string(static_cast<SkelJoint>(i))) == static_cast<SkelJoint>(i));
  CHECK_FALSE(keypoint_from_string("tail").has_value());
}
