#pragma once

#include "sketchanim/bvh.hpp"
#include "sketchanim/geometry.hpp"
#include "sketchanim/rig.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace sketchanim {

using RolePositions = std::array<Point3, kMotionRoleCount>;

/// Unit horizontal vector the actor faces: normalize((L - R) x up), where
/// L - R averages the shoulder and hip left-minus-right vectors and up = +Y.
/// Throws degenerate_pose when that vector has no horizontal extent.
Point3 compute_forward(const RolePositions& pose);

/// Mapped joint positions per frame after pinning the root above the origin
/// and yawing so the actor faces +X. `yaw` holds (cos, sin) of each frame's
/// rotation; `root_world` keeps the un-normalised root for root motion.
struct NormalizedMotion {
  std::vector<RolePositions> frames;
  std::vector<Eigen::Vector2d> yaw;
  std::vector<Point3> root_world;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

std::vector<RolePositions> mapped_positions(const MotionClip& clip, const SkeletonMap& map);
NormalizedMotion normalize_motion(const MotionClip& clip, const SkeletonMap& map);

struct PcaResult {
  Point3 normal;            // eigenvector of the smallest eigenvalue, unit length
  double eigenvalue = 0.0;  // smallest eigenvalue
  Eigen::Matrix3d covariance;
  bool ambiguous = false;   // smallest eigenvalue not unique
};

/// Mean-centred covariance of the cloud and its third principal component.
/// Throws validation for fewer than three points.
PcaResult pca_third_component(const std::vector<Point3>& cloud);

enum class PlaneKind { frontal, sagittal };

std::string_view to_string(PlaneKind k);

/// Screen basis for a body plane in the character's pixel frame (y down):
/// frontal maps (-Z * facing, -Y), sagittal maps (X * facing, -Y).
struct ProjectionPlane {
  PlaneKind kind = PlaneKind::frontal;
  int facing_sign = 1;

  Point2 project(const Point3& p) const;
  Point3 normal() const;

  friend bool operator==(const ProjectionPlane&, const ProjectionPlane&) = default;
};

struct PlaneChoice {
  PlaneKind kind = PlaneKind::frontal;
  bool ambiguous = false;
};

/// Frontal when |cos(v3, X)| >= |cos(v3, Z)|; ambiguous clouds fall back to frontal.
PlaneChoice select_plane(const std::vector<Point3>& cloud);

enum class PlaneMode { automatic, frontal, sagittal };

std::string_view to_string(PlaneMode m);

struct RetargetConfig {
  SkeletonMap skeleton_map = SkeletonMap::standard();
  PlaneMode upper_mode = PlaneMode::automatic;
  PlaneMode lower_mode = PlaneMode::automatic;
  /// Independent upper/lower planes; false shares the whole-body plane.
  bool twisted = true;
  RenderOrder render_order = default_render_order();
  int facing_sign = 1;
  bool vertical_root_motion = false;
  int frame_start = 0;
  /// Exclusive; negative means through the last frame.
  int frame_end = -1;

  void validate() const;
};

struct GroupPlanes {
  PlaneKind upper = PlaneKind::frontal;
  PlaneKind lower = PlaneKind::frontal;
  bool upper_ambiguous = false;
  bool lower_ambiguous = false;

  friend bool operator==(const GroupPlanes&, const GroupPlanes&) = default;
};

/// Upper cloud: shoulders, elbows, wrists, head and mid-shoulders. Lower
/// cloud: hips, knees, ankles. Explicit modes override PCA.
GroupPlanes select_group_planes(const NormalizedMotion& motion, const RetargetConfig& cfg);

/// atan2(dy, dx) in (-pi, pi]; nullopt when the points coincide.
std::optional<double> bone_angle(const Point2& parent, const Point2& child);

using BoneAngles = std::array<double, kRotatedBoneCount>;

struct RetargetPlan {
  GroupPlanes planes;
  int facing_sign = 1;
  double frame_time = 0.0;
  double root_scale = 1.0;
  /// Global angles per frame, indexed by RotatedBone, in the pixel frame.
  std::vector<BoneAngles> angles;
  std::vector<Point2> root_offsets;

  int frame_count() const { return static_cast<int>(angles.size()); }

  friend bool operator==(const RetargetPlan&, const RetargetPlan&) = default;
};

/// Mean of (upper + lower leg) over both sides.
double character_leg_length(const Skeleton& skeleton);
double actor_leg_length(const RolePositions& pose);

BoneAngles rest_angles(const Skeleton& skeleton);

/// Projects each frame onto the chosen planes and transfers global bone
/// angles; root offsets are the actor's horizontal travel scaled by
/// character leg / actor leg. Throws config on a zero actor leg length.
RetargetPlan build_plan(const MotionClip& clip, const Skeleton& skeleton, const RetargetConfig& cfg);

/// A plan that holds the rest pose for `frames` frames.
RetargetPlan rest_plan(const Skeleton& skeleton, int frames, double frame_time);

using SkeletonPose = std::array<Point2, kSkelJointCount>;

/// Lays bones out at their rest lengths along the frame's global angles;
/// connectors keep their rest offsets rotated by the spine's change in angle.
SkeletonPose pose_skeleton(const Skeleton& skeleton, const BoneAngles& angles,
                           const Point2& root_offset);

}  // namespace sketchanim
