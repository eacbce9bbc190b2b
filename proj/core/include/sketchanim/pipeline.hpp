#pragma once

#include "sketchanim/arap.hpp"
#include "sketchanim/bvh.hpp"
#include "sketchanim/config.hpp"
#include "sketchanim/image_io.hpp"
#include "sketchanim/mesh.hpp"
#include "sketchanim/raster.hpp"
#include "sketchanim/render.hpp"
#include "sketchanim/retarget.hpp"
#include "sketchanim/rig.hpp"
#include "sketchanim/segment.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sketchanim {

std::string_view version();

/// Mask plus the colour texture it was computed from, both at the
/// segmentation width.
struct Segmentation {
  BBox box;
  RasterImage texture;
  BinaryMask mask;
};

/// Crop (whole image when `box` is empty) -> extract_mask. The texture is the
/// crop resized to the mask's size.
Segmentation segment_image(const RasterImage& image, std::optional<BBox> box,
                           const SegmentParams& params = {});

/// Texture for a crop, resized to the mask width used by segmentation.
RasterImage crop_texture(const RasterImage& image, const BBox& box, int target_width);

/// Joints with the excluded ones replaced by their template positions over
/// the whole mask raster.
JointSet17 effective_joints(const JointSet17& joints, const std::vector<Keypoint>& excluded,
                            int mask_width, int mask_height);

/// Keypoints excluded for lying outside the mask's foreground box inflated by
/// `margin` of its size on each side.
std::vector<Keypoint> far_joints(const JointSet17& joints, const BinaryMask& mask,
                                 double margin = 0.1);

struct Rig {
  CharacterMesh mesh;
  Skeleton skeleton;
};

/// contour -> mesh -> skeleton -> groups. Stage errors carry the stage label.
Rig build_rig(const BinaryMask& mask, const JointSet17& joints,
              const TriangulateOptions& options = {});

/// Everything needed to animate one drawing.
struct Character {
  RasterImage texture;
  BinaryMask mask;
  JointSet17 joints;
  std::vector<Keypoint> excluded;
  std::optional<RenderOrder> render_order;
};

Character load_character(const CharacterConfig& cfg);

struct AnimateOptions {
  ViewportOverrides viewport;
  /// Overrides RetargetConfig::twisted when set.
  std::optional<bool> twisted;
  TriangulateOptions triangulate;
};

struct Animation {
  RetargetPlan plan;
  Rig rig;
  std::vector<std::vector<Point2>> deformed;
  Viewport viewport;
  AnimationOutput output;
};

/// plan -> pose -> ARAP -> rasterize. The character's render order, when
/// present, wins over the retarget config's.
Animation animate(const Character& character, const MotionClip& clip, RetargetConfig cfg,
                  const AnimateOptions& options = {});

/// Same pipeline driven by an explicit plan (e.g. the rest plan).
Animation animate_plan(const Character& character, const Rig& rig, const RetargetPlan& plan,
                       const RenderOrder& order, const AnimateOptions& options = {});

// File-level commands used by the CLI and the server.

struct SegmentCommandResult {
  std::filesystem::path character_config;
  std::filesystem::path mask;
  std::filesystem::path texture;
  std::filesystem::path contour;
  Segmentation segmentation;
};

/// Writes mask.png, texture.png, contour.json and character.json (template
/// joints) into `out_dir`.
SegmentCommandResult cmd_segment(const std::filesystem::path& image, std::optional<BBox> box,
                                 const SegmentParams& params,
                                 const std::filesystem::path& out_dir);

struct RigCommandResult {
  std::filesystem::path mesh;
  std::filesystem::path skeleton;
  Rig rig;
};

/// Writes mesh.json and skeleton.json into `out_dir`.
RigCommandResult cmd_rig(const std::filesystem::path& character_config,
                         const std::filesystem::path& out_dir);

/// Runs a scene; `format`/`output` override the scene file when given. Returns the
/// written files.
std::vector<std::filesystem::path> cmd_animate(const std::filesystem::path& scene,
                                               std::optional<bool> twisted,
                                               std::optional<OutputFormat> format,
                                               std::optional<std::filesystem::path> output);

/// Character + clip in memory -> GIF bytes.
Bytes render_gif(const Character& character, const MotionClip& clip, const RetargetConfig& cfg,
                 const AnimateOptions& options = {});

}  // namespace sketchanim
