#pragma once

#include "sketchanim/body_group.hpp"
#include "sketchanim/geometry.hpp"
#include "sketchanim/mesh.hpp"
#include "sketchanim/raster.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchanim {

/// The 17 COCO keypoints, in COCO order.
enum class Keypoint : int {
  nose,
  left_eye,
  right_eye,
  left_ear,
  right_ear,
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
};

inline constexpr int kKeypointCount = 17;

std::string_view to_string(Keypoint k);
std::optional<Keypoint> keypoint_from_string(std::string_view name);

/// Named 2D positions for all 17 keypoints, in pixels.
struct JointSet17 {
  std::array<Point2, kKeypointCount> points;

  Point2& operator[](Keypoint k) { return points[static_cast<int>(k)]; }
  const Point2& operator[](Keypoint k) const { return points[static_cast<int>(k)]; }
  bool finite() const;
};

/// Joints of the animation skeleton: root and chest are derived, the rest are
/// copied from the keypoints. Eyes and ears are not part of the tree.
enum class SkelJoint : int {
  root,
  chest,
  nose,
  left_shoulder,
  left_elbow,
  left_wrist,
  right_shoulder,
  right_elbow,
  right_wrist,
  left_hip,
  left_knee,
  left_ankle,
  right_hip,
  right_knee,
  right_ankle,
};

inline constexpr int kSkelJointCount = 15;

std::string_view to_string(SkelJoint j);
std::optional<SkelJoint> skel_joint_from_string(std::string_view name);

/// Bones whose global 2D orientation is driven by motion.
enum class RotatedBone : int {
  left_upper_arm,
  left_lower_arm,
  right_upper_arm,
  right_lower_arm,
  left_upper_leg,
  left_lower_leg,
  right_upper_leg,
  right_lower_leg,
  neck,
  spine,
};

inline constexpr int kRotatedBoneCount = 10;

std::string_view to_string(RotatedBone b);

struct Bone {
  SkelJoint parent;
  SkelJoint child;
  std::string name;
  /// Set for motion-driven bones; connectors (chest->shoulder, root->hip) are
  /// rigid trunk attachments and carry no value.
  std::optional<RotatedBone> rotated;
  BodyGroup group;
  double rest_length = 0.0;
};

struct Skeleton {
  std::array<Point2, kSkelJointCount> joints;
  /// Parent-before-child order; also the tie-break order for group assignment.
  std::vector<Bone> bones;

  const Point2& joint(SkelJoint j) const { return joints[static_cast<int>(j)]; }
  const Bone& bone(RotatedBone b) const;
};

/// root = mid-hips, chest = mid-shoulders; 14 bones (10 rotated, 4 trunk
/// connectors). Throws degenerate_rig naming the first zero-length rotated bone.
Skeleton build_skeleton(const JointSet17& joints);

/// Labels each triangle with the group of the bone nearest its centroid.
CharacterMesh assign_groups(CharacterMesh mesh, const Skeleton& skeleton);

/// Index of the bone nearest to `p` (earliest bone wins exact ties).
std::size_t nearest_bone(const Skeleton& skeleton, const Point2& p);

/// Canonical front-facing layout, as fractions of the box (x, y).
extern const std::array<std::array<double, 2>, kKeypointCount> kTemplateFractions;

JointSet17 default_joint_template(const BBox& box);

/// Draw order; later entries are painted on top.
using RenderOrder = std::array<BodyGroup, kBodyGroupCount>;

/// Throws validation unless `order` is a permutation of the nine groups.
RenderOrder render_order(const std::vector<BodyGroup>& order);
RenderOrder default_render_order();

}  // namespace sketchanim
