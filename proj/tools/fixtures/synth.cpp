#include "synth.hpp"

#include "sketchanim/geometry.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sketchanim::fixtures {

namespace {

constexpr double kPi = std::numbers::pi;

double rad(double deg) { return deg * kPi / 180.0; }

struct Capsule {
  Point2 a, b;
  double r;
};

// Body layout in canvas pixels; every coordinate below is for scale 1 on a
// 400 x 520 canvas and is scaled about the canvas centre.
struct Layout {
  JointSet17 joints;
  Point2 head;
  double head_r = 40;
  Point2 chest, pelvis;
  std::vector<Capsule> limbs;
  std::vector<Point2> torso;  // convex, for outline figures
};

Layout layout(const FigureSpec& s) {
  Layout L;
  // Odd strokes centred on a pixel centre cover exactly stroke_width columns.
  const double shift = s.stroke_width % 2 == 1 ? 0.5 : 0.0;
  const Point2 c(s.width / 2.0 + shift, s.height / 2.0 + shift);
  auto at = [&](double x, double y) { return Point2(c + s.scale * (Point2(x, y) - Point2(200, 260))); };
  auto dir = [](double deg) { return Point2(std::cos(rad(deg)), std::sin(rad(deg))); };
  using K = Keypoint;
  JointSet17& j = L.joints;
  L.head = at(200, 75);
  L.head_r = 40 * s.scale;
  L.chest = at(200, 145);
  L.pelvis = at(200, 285);
  j[K::nose] = at(200, 88);
  j[K::left_eye] = at(214, 66);
  j[K::right_eye] = at(186, 66);
  j[K::left_ear] = at(236, 76);
  j[K::right_ear] = at(164, 76);
  j[K::left_shoulder] = at(238, 150);
  j[K::right_shoulder] = at(162, 150);
  j[K::left_hip] = at(224, 285);
  j[K::right_hip] = at(176, 285);
  const double upper = 70 * s.scale, fore = 62 * s.scale, thigh = 95 * s.scale, shin = 88 * s.scale;
  j[K::left_elbow] = j[K::left_shoulder] + upper * dir(s.left_arm);
  j[K::left_wrist] = j[K::left_elbow] + fore * dir(s.left_forearm);
  j[K::right_elbow] = j[K::right_shoulder] + upper * dir(180 - s.right_arm);
  j[K::right_wrist] = j[K::right_elbow] + fore * dir(180 - s.right_forearm);
  j[K::left_knee] = j[K::left_hip] + thigh * dir(90 - s.leg_spread);
  j[K::left_ankle] = j[K::left_knee] + shin * dir(90 - 0.5 * s.leg_spread);
  j[K::right_knee] = j[K::right_hip] + thigh * dir(90 + s.leg_spread);
  j[K::right_ankle] = j[K::right_knee] + shin * dir(90 + 0.5 * s.leg_spread);
  const double arm_r = 13 * s.scale, leg_r = 16 * s.scale;
  L.limbs = {
      {j[K::left_shoulder], j[K::left_elbow], arm_r},  {j[K::left_elbow], j[K::left_wrist], arm_r},
      {j[K::right_shoulder], j[K::right_elbow], arm_r}, {j[K::right_elbow], j[K::right_wrist], arm_r},
      {j[K::left_hip], j[K::left_knee], leg_r},         {j[K::left_knee], j[K::left_ankle], leg_r},
      {j[K::right_hip], j[K::right_knee], leg_r},       {j[K::right_knee], j[K::right_ankle], leg_r},
      {L.chest, L.head + Point2(0, L.head_r * 0.8), 11 * s.scale},
  };
  L.torso = {at(250, 140), at(244, 300), at(156, 300), at(150, 140)};
  return L;
}

bool in_convex(const std::vector<Point2>& poly, const Point2& p) {
  const double sign = signed_area(Polygon{poly}) > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (sign * orient2d(poly[i], poly[(i + 1) % poly.size()], p) < 0) return false;
  return true;
}

bool in_region(const Layout& L, const Point2& p) {
  if ((p - L.head).norm() <= L.head_r) return true;
  if (in_convex(L.torso, p)) return true;
  for (const Capsule& c : L.limbs)
    if (point_segment_distance(p, c.a, c.b) <= c.r) return true;
  return false;
}

bool on_stick(const Layout& L, const Point2& p, double half) {
  if (std::abs((p - L.head).norm() - L.head_r) <= half) return true;
  const JointSet17& j = L.joints;
  using K = Keypoint;
  const std::array<std::pair<Point2, Point2>, 13> segs{{
      {L.chest, L.head + Point2(0, L.head_r)},
      {L.chest, L.pelvis},
      {j[K::left_shoulder], j[K::right_shoulder]},
      {j[K::left_hip], j[K::right_hip]},
      {j[K::left_shoulder], j[K::left_elbow]},
      {j[K::left_elbow], j[K::left_wrist]},
      {j[K::right_shoulder], j[K::right_elbow]},
      {j[K::right_elbow], j[K::right_wrist]},
      {j[K::left_hip], j[K::left_knee]},
      {j[K::left_knee], j[K::left_ankle]},
      {j[K::right_hip], j[K::right_knee]},
      {j[K::right_knee], j[K::right_ankle]},
      {Point2(L.chest.x(), j[K::left_shoulder].y()), L.chest},
  }};
  for (const auto& [a, b] : segs)
    if (point_segment_distance(p, a, b) <= half) return true;
  return false;
}

}  // namespace

SyntheticFigure make_figure(const FigureSpec& s) {
  const Layout L = layout(s);
  SyntheticFigure f;
  f.joints = L.joints;
  f.image = RasterImage(s.width, s.height, 255);
  f.ink = BinaryMask(s.width, s.height);
  auto centre = [](int x, int y) { return Point2(x + 0.5, y + 0.5); };
  if (s.style == FigureStyle::outline) {
    BinaryMask region(s.width, s.height);
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) region.set(x, y, in_region(L, centre(x, y)));
    const int w = s.stroke_width;
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) {
        if (!region.at(x, y)) continue;
        bool edge = false;
        for (int dy = -w; dy <= w && !edge; ++dy)
          for (int dx = -w; dx <= w && !edge; ++dx)
            if (dx * dx + dy * dy <= w * w && !region.get(x + dx, y + dy)) edge = true;
        f.ink.set(x, y, edge);
        if (!edge && s.fill[3] != 0) f.image.set(x, y, s.fill[0], s.fill[1], s.fill[2]);
      }
  } else {
    const double half = s.stroke_width / 2.0;
    for (int y = 0; y < s.height; ++y)
      for (int x = 0; x < s.width; ++x) f.ink.set(x, y, on_stick(L, centre(x, y), half));
  }
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if (f.ink.at(x, y)) f.image.set(x, y, s.ink[0], s.ink[1], s.ink[2]);
  f.silhouette = fill_holes(f.ink);
  return f;
}

std::vector<FigureSpec> figure_corpus(int count) {
  std::mt19937 rng(20230415);
  std::uniform_real_distribution<double> arm(-25.0, 80.0), bend(-20.0, 35.0), spread(4.0, 22.0),
      scale(0.75, 1.0);
  const std::array<std::array<std::uint8_t, 4>, 4> fills{{
      {255, 214, 170, 255}, {200, 230, 255, 255}, {255, 255, 255, 0}, {220, 255, 200, 255}}};
  std::vector<FigureSpec> out;
  for (int i = 0; i < count; ++i) {
    FigureSpec s;
    s.style = i % 2 == 0 ? FigureStyle::outline : FigureStyle::stick;
    s.stroke_width = 1 + i % 3;
    s.left_arm = arm(rng);
    s.right_arm = arm(rng);
    s.left_forearm = s.left_arm + bend(rng);
    s.right_forearm = s.right_arm + bend(rng);
    s.leg_spread = spread(rng);
    s.scale = scale(rng);
    s.fill = fills[i % fills.size()];
    out.push_back(s);
  }
  return out;
}

SyntheticFigure figure_with_scribble() {
  FigureSpec s;
  s.scale = 0.85;
  SyntheticFigure f = make_figure(s);
  const Point2 c(32, 40);
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 70; ++x) {
      const double d = (Point2(x + 0.5, y + 0.5) - c).norm();
      if (std::abs(d - 12.0) <= 1.0) {
        f.ink.set(x, y, true);
        f.image.set(x, y, s.ink[0], s.ink[1], s.ink[2]);
      }
    }
  return f;
}

namespace {

struct JointDef {
  const char* name;
  int parent;
  Point3 offset;
};

// Depth-first order; end sites follow their joint.
const std::vector<JointDef>& humanoid() {
  static const std::vector<JointDef> defs = {
      {"Hips", -1, {0, 0, 0}},
      {"Spine", 0, {0, 10, 0}},
      {"Neck", 1, {0, 15, 0}},
      {"Head", 2, {0, 6, 0}},
      {"LeftArm", 1, {8, 14, 0}},
      {"LeftForeArm", 4, {12, 0, 0}},
      {"LeftHand", 5, {10, 0, 0}},
      {"RightArm", 1, {-8, 14, 0}},
      {"RightForeArm", 7, {-12, 0, 0}},
      {"RightHand", 8, {-10, 0, 0}},
      {"LeftUpLeg", 0, {4, -2, 0}},
      {"LeftLeg", 10, {0, -18, 0}},
      {"LeftFoot", 11, {0, -17, 0}},
      {"RightUpLeg", 0, {-4, -2, 0}},
      {"RightLeg", 13, {0, -18, 0}},
      {"RightFoot", 14, {0, -17, 0}},
  };
  return defs;
}

Point3 end_offset(const std::string& name) {
  if (name == "Head") return {0, 8, 0};
  if (name == "LeftHand") return {4, 0, 0};
  if (name == "RightHand") return {-4, 0, 0};
  return {0, -2, 4};  // feet
}

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string vec(const Point3& p) { return num(p.x()) + " " + num(p.y()) + " " + num(p.z()); }

void write_joint(std::ostringstream& os, int index, int depth) {
  const auto& defs = humanoid();
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const JointDef& d = defs[index];
  os << pad << (d.parent < 0 ? "ROOT " : "JOINT ") << d.name << "\n" << pad << "{\n";
  os << pad << "  OFFSET " << vec(d.offset) << "\n";
  if (d.parent < 0)
    os << pad << "  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n";
  else
    os << pad << "  CHANNELS 3 Zrotation Xrotation Yrotation\n";
  bool leaf = true;
  for (std::size_t c = 0; c < defs.size(); ++c)
    if (defs[c].parent == index) {
      write_joint(os, static_cast<int>(c), depth + 1);
      leaf = false;
    }
  if (leaf) {
    os << pad << "  End Site\n" << pad << "  {\n";
    os << pad << "    OFFSET " << vec(end_offset(d.name)) << "\n" << pad << "  }\n";
  }
  os << pad << "}\n";
}

double cycle(int f, int frames, double cycles) { return 2.0 * kPi * cycles * f / frames; }

}  // namespace

std::string humanoid_bvh(int frames, double frame_time, const PoseFn& pose) {
  std::ostringstream os;
  os << "HIERARCHY\n";
  write_joint(os, 0, 0);
  os << "MOTION\nFrames: " << frames << "\nFrame Time: " << num(frame_time) << "\n";
  const auto& defs = humanoid();
  for (int f = 0; f < frames; ++f) {
    const HumanoidPose p = pose(f);
    std::string row = vec(p.root);
    for (const JointDef& d : defs) {
      const auto it = p.rotations.find(d.name);
      const Eigen::Vector3d r = it == p.rotations.end() ? Eigen::Vector3d::Zero() : it->second;
      row += " " + num(r[0]) + " " + num(r[1]) + " " + num(r[2]);
    }
    os << row << "\n";
  }
  return os.str();
}

MotionClip humanoid_clip(int frames, double frame_time, const PoseFn& pose) {
  return parse_bvh(humanoid_bvh(frames, frame_time, pose));
}

MotionClip tpose_clip(int frames, double yaw_deg, Point3 offset) {
  return humanoid_clip(frames, 1.0 / 30.0, [=](int) {
    HumanoidPose p;
    p.root += offset;
    p.rotations["Hips"] = {0, 0, yaw_deg};
    return p;
  });
}

namespace {

void jack_arms(HumanoidPose& p, double s) {
  p.rotations["LeftArm"] = {-80 + 150 * s, 0, 0};
  p.rotations["RightArm"] = {80 - 150 * s, 0, 0};
}

void walk_legs(HumanoidPose& p, double phi) {
  p.rotations["LeftUpLeg"] = {0, -30 * std::sin(phi), 0};
  p.rotations["LeftLeg"] = {0, 30 * (1 - std::cos(phi)) / 2, 0};
  p.rotations["RightUpLeg"] = {0, 30 * std::sin(phi), 0};
  p.rotations["RightLeg"] = {0, 30 * (1 + std::cos(phi)) / 2, 0};
}

}  // namespace

MotionClip jumping_jacks(int frames) {
  return humanoid_clip(frames, 1.0 / 30.0, [=](int f) {
    HumanoidPose p;
    const double s = 0.5 - 0.5 * std::cos(cycle(f, frames, 2));
    jack_arms(p, s);
    p.rotations["LeftUpLeg"] = {20 * s, 0, 0};
    p.rotations["RightUpLeg"] = {-20 * s, 0, 0};
    p.root.y() += 2 * s;
    return p;
  });
}

MotionClip walk(int frames) {
  return humanoid_clip(frames, 1.0 / 30.0, [=](int f) {
    HumanoidPose p;
    const double phi = cycle(f, frames, 2);
    walk_legs(p, phi);
    const double swing = 65 * std::sin(phi);
    p.rotations["LeftArm"] = {-88, 0, swing};
    p.rotations["LeftForeArm"] = {0, 0, 0.6 * swing};
    p.rotations["RightArm"] = {88, 0, swing};
    p.rotations["RightForeArm"] = {0, 0, 0.6 * swing};
    p.root.z() += 140.0 * f / frames;
    p.root.y() -= 1.5 * std::cos(2 * phi);
    return p;
  });
}

MotionClip wave_hello(int frames) {
  return humanoid_clip(frames, 1.0 / 30.0, [=](int f) {
    HumanoidPose p;
    p.rotations["LeftArm"] = {-80, 0, 0};
    p.rotations["RightArm"] = {-45, 0, 0};
    p.rotations["RightForeArm"] = {-40 + 30 * std::sin(cycle(f, frames, 3)), 0, 0};
    return p;
  });
}

MotionClip mixed(int frames) {
  return humanoid_clip(frames, 1.0 / 30.0, [=](int f) {
    HumanoidPose p;
    const double phi = cycle(f, frames, 2);
    jack_arms(p, 0.5 - 0.5 * std::cos(phi));
    walk_legs(p, phi);
    p.root.z() += 140.0 * f / frames;
    return p;
  });
}

MotionClip elbow_orbit(int frames, std::vector<double>* angles) {
  auto degrees = [=](int f) { return -150.0 + 300.0 * f / std::max(1, frames - 1); };
  if (angles) {
    angles->clear();
    for (int f = 0; f < frames; ++f) angles->push_back(-rad(degrees(f)));
  }
  return humanoid_clip(frames, 1.0 / 30.0, [=](int f) {
    HumanoidPose p;
    p.rotations["LeftArm"] = {degrees(f), 0, 0};
    return p;
  });
}

std::vector<NamedClip> gallery_clips() {
  return {
      {"jumping_jacks", "Jumping Jacks", [] { return jumping_jacks(60); }},
      {"walk", "Walk", [] { return walk(60); }},
      {"wave_hello", "Wave Hello", [] { return wave_hello(60); }},
      {"mixed", "Jack and Stride", [] { return mixed(60); }},
  };
}

}  // namespace sketchanim::fixtures
