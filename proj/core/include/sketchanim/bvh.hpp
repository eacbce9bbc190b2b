#pragma once

#include "sketchanim/geometry.hpp"

#include <Eigen/Geometry>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchanim {

enum class Channel { x_position, y_position, z_position, x_rotation, y_rotation, z_rotation };

std::string_view to_string(Channel c);

struct BvhJoint {
  std::string name;
  Point3 offset = Point3::Zero();
  std::vector<Channel> channels;
  int parent = -1;
  std::vector<int> children;
  bool end_site = false;
  /// Column of this joint's first channel in a frame row.
  int channel_offset = 0;

  friend bool operator==(const BvhJoint&, const BvhJoint&) = default;
};

/// Parsed BVH clip. Joints are stored in file (depth-first) order with the
/// root first; end sites appear as joints named "<parent>_End".
struct MotionClip {
  std::vector<BvhJoint> joints;
  int channel_count = 0;
  int frame_count = 0;
  double frame_time = 0.0;
  /// Frame-major, frame_count x channel_count.
  std::vector<double> data;

  const double* frame(int f) const { return data.data() + static_cast<std::size_t>(f) * channel_count; }
  std::optional<int> find(std::string_view name) const;

  friend bool operator==(const MotionClip&, const MotionClip&) = default;
};

/// Throws ErrorKind::parse with a line number.
MotionClip parse_bvh(std::string_view text);
MotionClip load_bvh(const std::string& path);
/// Shortest round-trip decimal formatting, so parse(serialize(c)) == c.
std::string serialize_bvh(const MotionClip& clip);

/// World transform of every joint (index-aligned with clip.joints). Degrees,
/// right-handed; each joint's rotations compose in its channel order.
std::vector<Eigen::Isometry3d> joint_transforms(const MotionClip& clip, int frame);
std::vector<Point3> forward_kinematics(const MotionClip& clip, int frame);
std::map<std::string, Point3> forward_kinematics_named(const MotionClip& clip, int frame);

enum class MotionRole : int {
  root,
  left_shoulder,
  right_shoulder,
  left_elbow,
  right_elbow,
  left_wrist,
  right_wrist,
  left_hip,
  right_hip,
  left_knee,
  right_knee,
  left_ankle,
  right_ankle,
  head,
};

inline constexpr int kMotionRoleCount = 14;

std::string_view to_string(MotionRole r);
std::optional<MotionRole> motion_role_from_string(std::string_view name);

/// Semantic role -> BVH joint name.
struct SkeletonMap {
  std::array<std::string, kMotionRoleCount> names;

  const std::string& operator[](MotionRole r) const { return names[static_cast<int>(r)]; }
  std::string& operator[](MotionRole r) { return names[static_cast<int>(r)]; }

  /// Joint indices in `clip`; throws config when a name is absent.
  std::array<int, kMotionRoleCount> resolve(const MotionClip& clip) const;

  /// Names used by common mocap exports (Hips, LeftArm, LeftForeArm, ...).
  static SkeletonMap standard();

  friend bool operator==(const SkeletonMap&, const SkeletonMap&) = default;
};

}  // namespace sketchanim
