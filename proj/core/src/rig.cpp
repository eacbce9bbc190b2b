#include "sketchanim/rig.hpp"

#include "sketchanim/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sketchanim {

namespace {

constexpr std::array<std::string_view, kKeypointCount> kKeypointNames = {
    "nose",          "left_eye",       "right_eye",  "left_ear",    "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
    "right_wrist",   "left_hip",       "right_hip",  "left_knee",   "right_knee",
    "left_ankle",    "right_ankle",
};

constexpr std::array<std::string_view, kSkelJointCount> kSkelJointNames = {
    "root",      "chest",     "nose",       "left_shoulder", "left_elbow",
    "left_wrist", "right_shoulder", "right_elbow", "right_wrist", "left_hip",
    "left_knee", "left_ankle", "right_hip", "right_knee",    "right_ankle",
};

constexpr std::array<std::string_view, kRotatedBoneCount> kRotatedBoneNames = {
    "left_upper_arm", "left_lower_arm", "right_upper_arm", "right_lower_arm", "left_upper_leg",
    "left_lower_leg", "right_upper_leg", "right_lower_leg", "neck",           "spine",
};

std::string human_name(std::string_view bone) {
  std::string s(bone);
  for (std::string_view side : {"left_", "right_"})
    if (s.rfind(side, 0) == 0) s = s.substr(side.size());
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

}  // namespace

std::string_view to_string(Keypoint k) { return kKeypointNames[static_cast<int>(k)]; }

std::optional<Keypoint> keypoint_from_string(std::string_view name) {
  for (int i = 0; i < kKeypointCount; ++i)
    if (kKeypointNames[i] == name) return static_cast<Keypoint>(i);
  return std::nullopt;
}

std::string_view to_string(SkelJoint j) { return kSkelJointNames[static_cast<int>(j)]; }

std::optional<SkelJoint> skel_joint_from_string(std::string_view name) {
  for (int i = 0; i < kSkelJointCount; ++i)
    if (kSkelJointNames[i] == name) return static_cast<SkelJoint>(i);
  return std::nullopt;
}

std::string_view to_string(RotatedBone b) { return kRotatedBoneNames[static_cast<int>(b)]; }

bool JointSet17::finite() const {
  return std::all_of(points.begin(), points.end(), [](const Point2& p) { return p.allFinite(); });
}

const Bone& Skeleton::bone(RotatedBone b) const {
  for (const Bone& bone : bones)
    if (bone.rotated == b) return bone;
  throw Error(ErrorKind::validation, "skeleton lacks bone " + std::string(to_string(b)));
}

Skeleton build_skeleton(const JointSet17& kp) {
  if (!kp.finite()) throw Error(ErrorKind::validation, "joint coordinates must be finite");
  using K = Keypoint;
  using J = SkelJoint;
  Skeleton s;
  auto set = [&](J j, const Point2& p) { s.joints[static_cast<int>(j)] = p; };
  set(J::root, 0.5 * (kp[K::left_hip] + kp[K::right_hip]));
  set(J::chest, 0.5 * (kp[K::left_shoulder] + kp[K::right_shoulder]));
  set(J::nose, kp[K::nose]);
  set(J::left_shoulder, kp[K::left_shoulder]);
  set(J::left_elbow, kp[K::left_elbow]);
  set(J::left_wrist, kp[K::left_wrist]);
  set(J::right_shoulder, kp[K::right_shoulder]);
  set(J::right_elbow, kp[K::right_elbow]);
  set(J::right_wrist, kp[K::right_wrist]);
  set(J::left_hip, kp[K::left_hip]);
  set(J::left_knee, kp[K::left_knee]);
  set(J::left_ankle, kp[K::left_ankle]);
  set(J::right_hip, kp[K::right_hip]);
  set(J::right_knee, kp[K::right_knee]);
  set(J::right_ankle, kp[K::right_ankle]);

  using R = RotatedBone;
  using G = BodyGroup;
  auto add = [&](J parent, J child, std::string name, std::optional<R> rotated, G group) {
    s.bones.push_back({parent, child, std::move(name), rotated, group, 0.0});
  };
  add(J::root, J::chest, "spine", R::spine, G::trunk);
  add(J::chest, J::nose, "neck", R::neck, G::trunk);
  add(J::chest, J::left_shoulder, "left_shoulder_connector", std::nullopt, G::trunk);
  add(J::left_shoulder, J::left_elbow, "left_upper_arm", R::left_upper_arm, G::left_upper_arm);
  add(J::left_elbow, J::left_wrist, "left_lower_arm", R::left_lower_arm, G::left_lower_arm);
  add(J::chest, J::right_shoulder, "right_shoulder_connector", std::nullopt, G::trunk);
  add(J::right_shoulder, J::right_elbow, "right_upper_arm", R::right_upper_arm, G::right_upper_arm);
  add(J::right_elbow, J::right_wrist, "right_lower_arm", R::right_lower_arm, G::right_lower_arm);
  add(J::root, J::left_hip, "left_hip_connector", std::nullopt, G::trunk);
  add(J::left_hip, J::left_knee, "left_upper_leg", R::left_upper_leg, G::left_upper_leg);
  add(J::left_knee, J::left_ankle, "left_lower_leg", R::left_lower_leg, G::left_lower_leg);
  add(J::root, J::right_hip, "right_hip_connector", std::nullopt, G::trunk);
  add(J::right_hip, J::right_knee, "right_upper_leg", R::right_upper_leg, G::right_upper_leg);
  add(J::right_knee, J::right_ankle, "right_lower_leg", R::right_lower_leg, G::right_lower_leg);

  for (Bone& b : s.bones) {
    b.rest_length = (s.joint(b.child) - s.joint(b.parent)).norm();
    if (b.rotated && b.rest_length == 0.0)
      throw Error(ErrorKind::degenerate_rig, "degenerate rig: bone '" + b.name + "' (" +
                                                 human_name(b.name) + ") has zero length");
  }
  return s;
}

std::size_t nearest_bone(const Skeleton& skeleton, const Point2& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < skeleton.bones.size(); ++i) {
    const Bone& b = skeleton.bones[i];
    const double d = point_segment_distance(p, skeleton.joint(b.parent), skeleton.joint(b.child));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

CharacterMesh assign_groups(CharacterMesh mesh, const Skeleton& skeleton) {
  mesh.groups.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    mesh.groups[t] = skeleton.bones[nearest_bone(skeleton, mesh.centroid(t))].group;
  return mesh;
}

// Figure's left is image right for a front-facing drawing.
const std::array<std::array<double, 2>, kKeypointCount> kTemplateFractions = {{
    {0.50, 0.08},  // nose
    {0.53, 0.06},  // left_eye
    {0.47, 0.06},  // right_eye
    {0.56, 0.07},  // left_ear
    {0.44, 0.07},  // right_ear
    {0.62, 0.30},  // left_shoulder
    {0.38, 0.30},  // right_shoulder
    {0.72, 0.42},  // left_elbow
    {0.28, 0.42},  // right_elbow
    {0.80, 0.52},  // left_wrist
    {0.20, 0.52},  // right_wrist
    {0.57, 0.55},  // left_hip
    {0.43, 0.55},  // right_hip
    {0.58, 0.75},  // left_knee
    {0.42, 0.75},  // right_knee
    {0.59, 0.95},  // left_ankle
    {0.41, 0.95},  // right_ankle
}};

JointSet17 default_joint_template(const BBox& box) {
  if (box.w <= 0 || box.h <= 0)
    throw Error(ErrorKind::invalid_box, "template box must have positive size");
  JointSet17 j;
  for (int i = 0; i < kKeypointCount; ++i)
    j.points[i] = Point2(box.x + kTemplateFractions[i][0] * box.w,
                         box.y + kTemplateFractions[i][1] * box.h);
  return j;
}

RenderOrder render_order(const std::vector<BodyGroup>& order) {
  if (order.size() != kBodyGroupCount)
    throw Error(ErrorKind::validation, "render order must list all nine body groups exactly once");
  std::array<bool, kBodyGroupCount> seen{};
  RenderOrder out{};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int g = static_cast<int>(order[i]);
    if (seen[g])
      throw Error(ErrorKind::validation,
                  "render order lists '" + std::string(to_string(order[i])) + "' twice");
    seen[g] = true;
    out[i] = order[i];
  }
  return out;
}

RenderOrder default_render_order() {
  using G = BodyGroup;
  return {G::left_upper_leg, G::left_lower_leg,  G::right_upper_leg,
          G::right_lower_leg, G::trunk,          G::left_upper_arm,
          G::left_lower_arm,  G::right_upper_arm, G::right_lower_arm};
}

}  // namespace sketchanim
