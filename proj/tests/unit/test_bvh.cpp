#include "oracles.hpp"
#include "synth.hpp"

#include "sketchanim/bvh.hpp"
#include "sketchanim/error.hpp"

#include <doctest.h>

#include <string>

using namespace sketchanim;

namespace {

const char* kTwoJoint = R"(HIERARCHY
ROOT Hips
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT Chest
  {
    OFFSET 0 10 0
    CHANNELS 3 Zrotation Xrotation Yrotation
    End Site
    {
      OFFSET 0 5 0
    }
  }
}
MOTION
Frames: 3
Frame Time: 0.0333333
0 0 0 0 0 0 0 0 0
5 0 0 90 0 0 0 0 0
0 0 0 0 90 0 0 0 0
)";

// Mixed channel orders, a zero-channel joint and a translating non-root.
const char* kOddOrders = R"(HIERARCHY
ROOT Root
{
  OFFSET 1 2 3
  CHANNELS 6 Zposition Yrotation Xposition Xrotation Yposition Zrotation
  JOINT Fixed
  {
    OFFSET 4 0 0
    CHANNELS 0
    JOINT Slider
    {
      OFFSET 0 3 1
      CHANNELS 6 Xrotation Yrotation Zrotation Xposition Yposition Zposition
      End Site
      {
        OFFSET 2 2 2
      }
    }
  }
}
MOTION
Frames: 4
Frame Time: 0.04
0 0 0 0 0 0 0 0 0 0 0 0
1.5 30 -2 45 0.5 -60 10 20 30 1 2 3
-3 170 4 -80 1 15 -45 90 12 0 0 -1
0.25 -33.3 7 12 -9 200 5 -5 5 0.1 0.2 0.3
)";

// Matrix-stack FK: per joint, T(offset + positions) then rotations in
// channel order, accumulated root to leaf.
std::vector<Eigen::Vector3d> oracle_fk(const MotionClip& clip, int f) {
  std::vector<Eigen::Matrix4d> world(clip.joints.size());
  std::vector<Eigen::Vector3d> out;
  for (std::size_t i = 0; i < clip.joints.size(); ++i) {
    const BvhJoint& j = clip.joints[i];
    double t[3] = {j.offset.x(), j.offset.y(), j.offset.z()};
    Eigen::Matrix4d R = Eigen::Matrix4d::Identity();
    for (std::size_t k = 0; k < j.channels.size(); ++k) {
      const double v = clip.frame(f)[j.channel_offset + k];
      switch (j.channels[k]) {
        case Channel::x_position: t[0] += v; break;
        case Channel::y_position: t[1] += v; break;
        case Channel::z_position: t[2] += v; break;
        case Channel::x_rotation: R = R * oracle::rotation('X', v); break;
        case Channel::y_rotation: R = R * oracle::rotation('Y', v); break;
        case Channel::z_rotation: R = R * oracle::rotation('Z', v); break;
      }
    }
    const Eigen::Matrix4d local = oracle::translation(t[0], t[1], t[2]) * R;
    world[i] = j.parent < 0 ? local : Eigen::Matrix4d(world[j.parent] * local);
    out.push_back(world[i].block<3, 1>(0, 3));
  }
  return out;
}

void check_against_oracle(const MotionClip& clip) {
  for (int f = 0; f < clip.frame_count; ++f) {
    const auto fk = forward_kinematics(clip, f);
    const auto ref = oracle_fk(clip, f);
    for (std::size_t i = 0; i < fk.size(); ++i) CHECK((fk[i] - ref[i]).norm() < 1e-6);
  }
}

}  // namespace

TEST_CASE("hierarchy, channels and end sites") {
  const MotionClip clip = parse_bvh(kTwoJoint);
  REQUIRE(clip.joints.size() == 3);
  CHECK(clip.joints[0].name == "Hips");
  CHECK(clip.joints[1].parent == 0);
  CHECK(clip.joints[2].end_site);
  CHECK(clip.joints[2].name == "Chest_End");
  CHECK(clip.channel_count == 9);
  CHECK(clip.frame_count == 3);
  CHECK(clip.frame_time == doctest::Approx(0.0333333));
  CHECK(clip.joints[1].channel_offset == 6);
  CHECK(clip.find("Chest") == 1);
  CHECK_FALSE(clip.find("Tail").has_value());
}

TEST_CASE("frame 0 with zero channels is the offset sum") {
  const auto p = forward_kinematics_named(parse_bvh(kTwoJoint), 0);
  CHECK((p.at("Chest") - Point3(0, 10, 0)).norm() < 1e-12);
  CHECK((p.at("Chest_End") - Point3(0, 15, 0)).norm() < 1e-12);
}

TEST_CASE("Z rotation of 90 degrees swings +Y to -X") {
  const auto p = forward_kinematics_named(parse_bvh(kTwoJoint), 1);
  CHECK((p.at("Hips") - Point3(5, 0, 0)).norm() < 1e-12);
  CHECK((p.at("Chest") - Point3(-5, 0, 0)).norm() < 1e-9);
}

TEST_CASE("X rotation of 90 degrees swings +Y to +Z") {
  const auto p = forward_kinematics_named(parse_bvh(kTwoJoint), 2);
  CHECK((p.at("Chest") - Point3(0, 0, 10)).norm() < 1e-9);
}

TEST_CASE("FK matches the matrix-stack oracle") {
  SUBCASE("odd channel orders") { check_against_oracle(parse_bvh(kOddOrders)); }
  SUBCASE("fixture clips") {
    for (const auto& c : fixtures::gallery_clips()) {
      CAPTURE(c.id);
      check_against_oracle(c.make());
    }
  }
}

TEST_CASE("parent-child distances do not change over time") {
  for (const auto& c : fixtures::gallery_clips()) {
    const MotionClip clip = c.make();
    const auto rest = forward_kinematics(clip, 0);
    for (int f = 1; f < clip.frame_count; ++f) {
      const auto pos = forward_kinematics(clip, f);
      for (std::size_t i = 0; i < clip.joints.size(); ++i) {
        const int p = clip.joints[i].parent;
        if (p < 0) continue;
        // A joint that translates relative to its parent has no fixed length.
        bool slides = false;
        for (Channel ch : clip.joints[i].channels)
          slides |= ch == Channel::x_position || ch == Channel::y_position || ch == Channel::z_position;
        if (slides) continue;
        CHECK(std::abs((pos[i] - pos[p]).norm() - (rest[i] - rest[p]).norm()) < 1e-9);
      }
    }
  }
}

TEST_CASE("serialisation round-trips exactly") {
  for (const char* text : {kTwoJoint, kOddOrders}) {
    const MotionClip a = parse_bvh(text);
    const std::string s = serialize_bvh(a);
    const MotionClip b = parse_bvh(s);
    CHECK(a == b);
    CHECK(serialize_bvh(b) == s);
  }
  const MotionClip walk = fixtures::walk(30);
  CHECK(parse_bvh(serialize_bvh(walk)) == walk);
}

TEST_CASE("malformed files report a line") {
  auto expect_parse_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_bvh(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  std::string text = kTwoJoint;
  SUBCASE("frame count mismatch") {
    text.replace(text.find("Frames: 3"), 9, "Frames: 5");
    expect_parse_error(text, "declared 5 frames");
  }
  SUBCASE("short row") {
    text.replace(text.find("5 0 0 90"), 8, "5 0 90");
    expect_parse_error(text, "line 20");
  }
  SUBCASE("missing motion") { expect_parse_error(text.substr(0, text.find("MOTION")), "MOTION"); }
  SUBCASE("bad number") {
    text.replace(text.find("OFFSET 0 10 0"), 13, "OFFSET 0 x 0");
    expect_parse_error(text, "line 8");
  }
  SUBCASE("empty") { expect_parse_error("", "line 1"); }
}

TEST_CASE("skeleton map resolves standard names") {
  const MotionClip clip = fixtures::walk(4);
  const auto idx = SkeletonMap::standard().resolve(clip);
  CHECK(clip.joints[idx[static_cast<int>(MotionRole::root)]].name == "Hips");
  CHECK(clip.joints[idx[static_cast<int>(MotionRole::left_elbow)]].name == "LeftForeArm");
  SkeletonMap m = SkeletonMap::standard();
  m[MotionRole::head] = "Skull";
  try {
    m.resolve(clip);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("Skull") != std::string::npos);
  }
  for (int r = 0; r < kMotionRoleCount; ++r)
    CHECK(motion_role_from_string(to_string(static_cast<MotionRole>(r))) == static_cast<MotionRole>(r));
}

TEST_CASE("frames out of range are rejected") {
  const MotionClip clip = parse_bvh(kTwoJoint);
  CHECK_THROWS_AS(forward_kinematics(clip, 3), Error);
  CHECK_THROWS_AS(forward_kinematics(clip, -1), Error);
}
