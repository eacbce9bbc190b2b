#pragma once

#include "sketchanim/bvh.hpp"
#include "sketchanim/raster.hpp"
#include "sketchanim/rig.hpp"
#include "sketchanim/segment.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

// Deterministic generators for drawings and motion clips used by tests,
// benchmarks and the bundled gallery.

namespace sketchanim::fixtures {

enum class FigureStyle { stick, outline };

struct FigureSpec {
  FigureStyle style = FigureStyle::outline;
  int stroke_width = 2;
  int width = 400;
  int height = 520;
  /// Upper arm angles below horizontal, degrees (left, right).
  double left_arm = 60.0;
  double right_arm = 60.0;
  double left_forearm = 75.0;
  double right_forearm = 75.0;
  /// Leg spread from vertical, degrees.
  double leg_spread = 10.0;
  double scale = 1.0;
  /// Light fill inside outline figures; alpha 0 leaves the paper white.
  std::array<std::uint8_t, 4> fill{255, 214, 170, 255};
  std::array<std::uint8_t, 3> ink{20, 20, 40};
};

struct SyntheticFigure {
  RasterImage image;
  BinaryMask ink;         // pixels drawn with the pen
  BinaryMask silhouette;  // region enclosed by the drawing
  JointSet17 joints;
};

SyntheticFigure make_figure(const FigureSpec& spec);

/// Varied figures: both styles, stroke widths 1-3, differing poses.
std::vector<FigureSpec> figure_corpus(int count = 24);

/// A figure with a disconnected scribble in a corner.
SyntheticFigure figure_with_scribble();

// Motion clips on a small humanoid facing +Z, Y up, left hand at +X. Every
// joint rotates Z, X, Y (degrees); the root also translates.

struct HumanoidPose {
  Point3 root{0.0, 37.0, 0.0};
  /// Joint name -> (z, x, y) rotation in degrees; missing joints stay at zero.
  std::map<std::string, Eigen::Vector3d> rotations;
};

using PoseFn = std::function<HumanoidPose(int frame)>;

/// BVH text for the humanoid driven by `pose`.
std::string humanoid_bvh(int frames, double frame_time, const PoseFn& pose);
MotionClip humanoid_clip(int frames, double frame_time, const PoseFn& pose);

/// Standing T-pose, optionally yawed about +Y and offset.
MotionClip tpose_clip(int frames, double yaw_deg = 0.0, Point3 offset = Point3::Zero());
/// Arms and legs swing in the frontal plane only.
MotionClip jumping_jacks(int frames = 60);
/// Arms down, limbs swing in the sagittal plane, root walks along +Z.
MotionClip walk(int frames = 60);
/// Right forearm waves above the head; everything stays frontal.
MotionClip wave_hello(int frames = 60);
/// Frontal jumping-jack arms over sagittal walking legs.
MotionClip mixed(int frames = 60);
/// Left upper arm sweeps around the shoulder in the frontal plane. `angles`
/// receives the expected screen angle of the left upper arm per frame
/// (radians, pixel frame, y down).
MotionClip elbow_orbit(int frames, std::vector<double>* angles);

struct NamedClip {
  std::string id;
  std::string name;
  std::function<MotionClip()> make;
};
/// The bundled gallery, in display order.
std::vector<NamedClip> gallery_clips();

}  // namespace sketchanim::fixtures
