#include "sketchanim/retarget.hpp"

#include "sketchanim/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sketchanim {

namespace {

using R = MotionRole;

const Point3& at(const RolePositions& p, MotionRole r) { return p[static_cast<int>(r)]; }

Point3 mid_shoulders(const RolePositions& p) {
  return 0.5 * (at(p, R::left_shoulder) + at(p, R::right_shoulder));
}

Point3 mid_hips(const RolePositions& p) { return 0.5 * (at(p, R::left_hip) + at(p, R::right_hip)); }

// Actor-side endpoints of each rotated bone, mirroring how the character's
// root and chest are derived.
std::pair<Point3, Point3> actor_bone(const RolePositions& p, RotatedBone b) {
  switch (b) {
    case RotatedBone::left_upper_arm: return {at(p, R::left_shoulder), at(p, R::left_elbow)};
    case RotatedBone::left_lower_arm: return {at(p, R::left_elbow), at(p, R::left_wrist)};
    case RotatedBone::right_upper_arm: return {at(p, R::right_shoulder), at(p, R::right_elbow)};
    case RotatedBone::right_lower_arm: return {at(p, R::right_elbow), at(p, R::right_wrist)};
    case RotatedBone::left_upper_leg: return {at(p, R::left_hip), at(p, R::left_knee)};
    case RotatedBone::left_lower_leg: return {at(p, R::left_knee), at(p, R::left_ankle)};
    case RotatedBone::right_upper_leg: return {at(p, R::right_hip), at(p, R::right_knee)};
    case RotatedBone::right_lower_leg: return {at(p, R::right_knee), at(p, R::right_ankle)};
    case RotatedBone::neck: return {mid_shoulders(p), at(p, R::head)};
    case RotatedBone::spine: return {mid_hips(p), mid_shoulders(p)};
  }
  return {};
}

bool is_lower(RotatedBone b) {
  switch (b) {
    case RotatedBone::left_upper_leg:
    case RotatedBone::left_lower_leg:
    case RotatedBone::right_upper_leg:
    case RotatedBone::right_lower_leg: return true;
    default: return false;
  }
}

void append_upper(const RolePositions& p, std::vector<Point3>& cloud) {
  for (R r : {R::left_shoulder, R::right_shoulder, R::left_elbow, R::right_elbow, R::left_wrist,
              R::right_wrist, R::head})
    cloud.push_back(at(p, r));
  cloud.push_back(mid_shoulders(p));
}

void append_lower(const RolePositions& p, std::vector<Point3>& cloud) {
  for (R r : {R::left_hip, R::right_hip, R::left_knee, R::right_knee, R::left_ankle, R::right_ankle})
    cloud.push_back(at(p, r));
}

PlaneKind resolve_mode(PlaneMode mode, PlaneKind automatic) {
  switch (mode) {
    case PlaneMode::frontal: return PlaneKind::frontal;
    case PlaneMode::sagittal: return PlaneKind::sagittal;
    case PlaneMode::automatic: break;
  }
  return automatic;
}

Point2 rotate(const Point2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

}  // namespace

Point3 compute_forward(const RolePositions& pose) {
  const Point3 lateral = 0.5 * ((at(pose, R::left_shoulder) - at(pose, R::right_shoulder)) +
                                (at(pose, R::left_hip) - at(pose, R::right_hip)));
  const double len = lateral.norm();
  if (len < 1e-12)
    throw Error(ErrorKind::degenerate_pose, "shoulder and hip vectors cancel; cannot find forward");
  const Point3 forward = (lateral / len).cross(Point3::UnitY());
  const double flen = forward.norm();
  if (flen < 1e-9)
    throw Error(ErrorKind::degenerate_pose, "shoulder/hip vector is vertical; cannot find forward");
  return forward / flen;
}

std::vector<RolePositions> mapped_positions(const MotionClip& clip, const SkeletonMap& map) {
  const auto idx = map.resolve(clip);
  std::vector<RolePositions> out(clip.frame_count);
  for (int f = 0; f < clip.frame_count; ++f) {
    const auto pos = forward_kinematics(clip, f);
    for (int r = 0; r < kMotionRoleCount; ++r) out[f][r] = pos[idx[r]];
  }
  return out;
}

NormalizedMotion normalize_motion(const MotionClip& clip, const SkeletonMap& map) {
  NormalizedMotion nm;
  nm.frames = mapped_positions(clip, map);
  nm.yaw.reserve(nm.frames.size());
  nm.root_world.reserve(nm.frames.size());
  for (RolePositions& frame : nm.frames) {
    const Point3 root = at(frame, R::root);
    nm.root_world.push_back(root);
    const Point3 fwd = compute_forward(frame);
    // Yaw about +Y taking (fx, 0, fz) onto +X.
    const double c = fwd.x(), s = fwd.z();
    nm.yaw.emplace_back(c, s);
    for (Point3& p : frame) {
      const double x = p.x() - root.x();
      const double z = p.z() - root.z();
      p = Point3(c * x + s * z, p.y(), -s * x + c * z);
    }
  }
  return nm;
}

PcaResult pca_third_component(const std::vector<Point3>& cloud) {
  if (cloud.size() < 3)
    throw Error(ErrorKind::validation, "principal components need at least three points");
  Point3 mean = Point3::Zero();
  for (const Point3& p : cloud) mean += p;
  mean /= static_cast<double>(cloud.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : cloud) {
    const Point3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cloud.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const auto& values = solver.eigenvalues();  // ascending
  PcaResult out;
  out.covariance = cov;
  out.eigenvalue = values[0];
  out.normal = solver.eigenvectors().col(0).normalized();
  out.ambiguous = values[1] - values[0] <= 1e-9 * std::max(1.0, std::abs(values[2]));
  return out;
}

std::string_view to_string(PlaneKind k) { return k == PlaneKind::frontal ? "frontal" : "sagittal"; }

std::string_view to_string(PlaneMode m) {
  switch (m) {
    case PlaneMode::automatic: return "auto";
    case PlaneMode::frontal: return "frontal";
    case PlaneMode::sagittal: return "sagittal";
  }
  return "auto";
}

Point2 ProjectionPlane::project(const Point3& p) const {
  if (kind == PlaneKind::frontal) return {-p.z() * facing_sign, -p.y()};
  return {p.x() * facing_sign, -p.y()};
}

Point3 ProjectionPlane::normal() const {
  return kind == PlaneKind::frontal ? Point3::UnitX() : Point3::UnitZ();
}

PlaneChoice select_plane(const std::vector<Point3>& cloud) {
  const PcaResult pca = pca_third_component(cloud);
  if (pca.ambiguous) return {PlaneKind::frontal, true};
  const double frontal = std::abs(pca.normal.dot(Point3::UnitX()));
  const double sagittal = std::abs(pca.normal.dot(Point3::UnitZ()));
  return {frontal >= sagittal ? PlaneKind::frontal : PlaneKind::sagittal, false};
}

void RetargetConfig::validate() const {
  if (facing_sign != 1 && facing_sign != -1)
    throw Error(ErrorKind::config, "facing_sign must be +1 or -1");
  if (frame_start < 0) throw Error(ErrorKind::config, "frame_start must be non-negative");
  if (frame_end >= 0 && frame_end <= frame_start)
    throw Error(ErrorKind::config, "frame_end must be greater than frame_start");
  sketchanim::render_order(std::vector<BodyGroup>(render_order.begin(), render_order.end()));
}

GroupPlanes select_group_planes(const NormalizedMotion& motion, const RetargetConfig& cfg) {
  std::vector<Point3> upper, lower;
  for (const RolePositions& f : motion.frames) {
    append_upper(f, upper);
    append_lower(f, lower);
  }
  GroupPlanes out;
  if (cfg.twisted) {
    const PlaneChoice u = select_plane(upper);
    const PlaneChoice l = select_plane(lower);
    out.upper = u.kind;
    out.lower = l.kind;
    out.upper_ambiguous = u.ambiguous;
    out.lower_ambiguous = l.ambiguous;
  } else {
    std::vector<Point3> whole;
    whole.reserve(upper.size() + lower.size() + motion.frames.size());
    for (const RolePositions& f : motion.frames) {
      append_upper(f, whole);
      append_lower(f, whole);
      whole.push_back(at(f, R::root));
    }
    const PlaneChoice w = select_plane(whole);
    out.upper = out.lower = w.kind;
    out.upper_ambiguous = out.lower_ambiguous = w.ambiguous;
  }
  out.upper = resolve_mode(cfg.upper_mode, out.upper);
  out.lower = resolve_mode(cfg.lower_mode, out.lower);
  return out;
}

std::optional<double> bone_angle(const Point2& parent, const Point2& child) {
  const Point2 d = child - parent;
  if (d.squaredNorm() < 1e-24) return std::nullopt;
  double a = std::atan2(d.y(), d.x());
  if (a <= -M_PI) a = M_PI;
  return a;
}

double character_leg_length(const Skeleton& s) {
  using B = RotatedBone;
  return 0.5 * (s.bone(B::left_upper_leg).rest_length + s.bone(B::left_lower_leg).rest_length +
                s.bone(B::right_upper_leg).rest_length + s.bone(B::right_lower_leg).rest_length);
}

double actor_leg_length(const RolePositions& p) {
  const double left = (at(p, R::left_knee) - at(p, R::left_hip)).norm() +
                      (at(p, R::left_ankle) - at(p, R::left_knee)).norm();
  const double right = (at(p, R::right_knee) - at(p, R::right_hip)).norm() +
                       (at(p, R::right_ankle) - at(p, R::right_knee)).norm();
  return 0.5 * (left + right);
}

BoneAngles rest_angles(const Skeleton& skeleton) {
  BoneAngles out{};
  for (int b = 0; b < kRotatedBoneCount; ++b) {
    const Bone& bone = skeleton.bone(static_cast<RotatedBone>(b));
    out[b] = bone_angle(skeleton.joint(bone.parent), skeleton.joint(bone.child)).value_or(0.0);
  }
  return out;
}

RetargetPlan build_plan(const MotionClip& clip, const Skeleton& skeleton, const RetargetConfig& cfg) {
  cfg.validate();
  if (clip.frame_count < 1) throw Error(ErrorKind::config, "motion clip has no frames");
  const int start = cfg.frame_start;
  const int end = cfg.frame_end < 0 ? clip.frame_count : std::min(cfg.frame_end, clip.frame_count);
  if (start >= end)
    throw Error(ErrorKind::config, "frame range is empty for a clip of " +
                                       std::to_string(clip.frame_count) + " frames");

  const NormalizedMotion nm = normalize_motion(clip, cfg.skeleton_map);
  RetargetPlan plan;
  plan.planes = select_group_planes(nm, cfg);
  plan.facing_sign = cfg.facing_sign;
  plan.frame_time = clip.frame_time;

  const double actor_leg = actor_leg_length(nm.frames[0]);
  if (!(actor_leg > 1e-12)) throw Error(ErrorKind::config, "actor leg length is zero");
  plan.root_scale = character_leg_length(skeleton) / actor_leg;

  const ProjectionPlane upper{plan.planes.upper, cfg.facing_sign};
  const ProjectionPlane lower{plan.planes.lower, cfg.facing_sign};
  BoneAngles previous = rest_angles(skeleton);
  // Root travel is expressed in the heading the actor had at the first frame.
  const Eigen::Vector2d yaw0 = nm.yaw[start];
  const Point3 root0 = nm.root_world[start];
  for (int f = start; f < end; ++f) {
    BoneAngles angles{};
    for (int b = 0; b < kRotatedBoneCount; ++b) {
      const auto bone = static_cast<RotatedBone>(b);
      const ProjectionPlane& plane = is_lower(bone) ? lower : upper;
      const auto [from, to] = actor_bone(nm.frames[f], bone);
      angles[b] = bone_angle(plane.project(from), plane.project(to)).value_or(previous[b]);
    }
    previous = angles;
    plan.angles.push_back(angles);

    const Point3 d = nm.root_world[f] - root0;
    const double forward = yaw0.x() * d.x() + yaw0.y() * d.z();
    Point2 offset(cfg.facing_sign * forward * plan.root_scale, 0.0);
    if (cfg.vertical_root_motion) offset.y() = -d.y() * plan.root_scale;
    plan.root_offsets.push_back(offset);
  }
  return plan;
}

RetargetPlan rest_plan(const Skeleton& skeleton, int frames, double frame_time) {
  RetargetPlan plan;
  plan.frame_time = frame_time;
  plan.angles.assign(frames, rest_angles(skeleton));
  plan.root_offsets.assign(frames, Point2::Zero());
  return plan;
}

SkeletonPose pose_skeleton(const Skeleton& skeleton, const BoneAngles& angles,
                           const Point2& root_offset) {
  SkeletonPose pose{};
  const int root = static_cast<int>(SkelJoint::root);
  pose[root] = skeleton.joints[root] + root_offset;
  const Bone& spine = skeleton.bone(RotatedBone::spine);
  const double rest_spine =
      bone_angle(skeleton.joint(spine.parent), skeleton.joint(spine.child)).value_or(0.0);
  const double spine_delta = angles[static_cast<int>(RotatedBone::spine)] - rest_spine;
  for (const Bone& b : skeleton.bones) {
    const Point2& parent = pose[static_cast<int>(b.parent)];
    Point2& child = pose[static_cast<int>(b.child)];
    if (b.rotated) {
      const double a = angles[static_cast<int>(*b.rotated)];
      child = parent + b.rest_length * Point2(std::cos(a), std::sin(a));
    } else {
      child = parent + rotate(skeleton.joint(b.child) - skeleton.joint(b.parent), spine_delta);
    }
  }
  return pose;
}

}  // namespace sketchanim
