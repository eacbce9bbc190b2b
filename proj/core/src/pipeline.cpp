#include "sketchanim/pipeline.hpp"

#include "sketchanim/contour.hpp"
#include "sketchanim/error.hpp"
#include "sketchanim/gif.hpp"
#include "sketchanim/image_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace sketchanim {

namespace fs = std::filesystem;

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::optional<SkelJoint> skel_joint_of(Keypoint k) {
  switch (k) {
    case Keypoint::nose: return SkelJoint::nose;
    case Keypoint::left_shoulder: return SkelJoint::left_shoulder;
    case Keypoint::right_shoulder: return SkelJoint::right_shoulder;
    case Keypoint::left_elbow: return SkelJoint::left_elbow;
    case Keypoint::right_elbow: return SkelJoint::right_elbow;
    case Keypoint::left_wrist: return SkelJoint::left_wrist;
    case Keypoint::right_wrist: return SkelJoint::right_wrist;
    case Keypoint::left_hip: return SkelJoint::left_hip;
    case Keypoint::right_hip: return SkelJoint::right_hip;
    case Keypoint::left_knee: return SkelJoint::left_knee;
    case Keypoint::right_knee: return SkelJoint::right_knee;
    case Keypoint::left_ankle: return SkelJoint::left_ankle;
    case Keypoint::right_ankle: return SkelJoint::right_ankle;
    default: return std::nullopt;
  }
}

// Runs body(i) for i in [0, n) across a few threads; results land in
// caller-owned slots so the output does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Viewport apply_overrides(Viewport vp, const ViewportOverrides& o) {
  if (o.width) vp.width = *o.width;
  if (o.height) vp.height = *o.height;
  if (o.scale) vp.scale = *o.scale;
  if (o.translation) vp.translation = Point2((*o.translation)[0], (*o.translation)[1]);
  if (o.background)
    for (int i = 0; i < 4; ++i) vp.background[i] = static_cast<std::uint8_t>((*o.background)[i]);
  vp.validate();
  return vp;
}

}  // namespace

std::string_view version() { return SKETCHANIM_VERSION; }

RasterImage crop_texture(const RasterImage& image, const BBox& box, int target_width) {
  return resize_to_width(crop(image, box), target_width);
}

Segmentation segment_image(const RasterImage& image, std::optional<BBox> box,
                           const SegmentParams& params) {
  return staged("segment", [&] {
    params.validate();
    Segmentation s;
    s.box = box ? clip_box(*box, image.width(), image.height())
                : BBox{0, 0, image.width(), image.height()};
    if (s.box.w <= 0 || s.box.h <= 0)
      throw Error(ErrorKind::invalid_box, "bounding box does not overlap the image");
    const RasterImage cropped = crop(image, s.box);
    s.mask = extract_mask(to_grayscale(cropped), params);
    s.texture = resize_to_width(cropped, s.mask.width());
    return s;
  });
}

JointSet17 effective_joints(const JointSet17& joints, const std::vector<Keypoint>& excluded,
                            int mask_width, int mask_height) {
  if (excluded.empty()) return joints;
  const JointSet17 tmpl = default_joint_template(BBox{0, 0, mask_width, mask_height});
  JointSet17 out = joints;
  for (Keypoint k : excluded) out[k] = tmpl[k];
  return out;
}

std::vector<Keypoint> far_joints(const JointSet17& joints, const BinaryMask& mask, double margin) {
  std::vector<Keypoint> out;
  const BBox b = foreground_bbox(mask);
  if (b.w <= 0 || b.h <= 0) return out;
  const double x0 = b.x - margin * b.w, x1 = b.x + b.w + margin * b.w;
  const double y0 = b.y - margin * b.h, y1 = b.y + b.h + margin * b.h;
  for (int k = 0; k < kKeypointCount; ++k) {
    const Point2& p = joints.points[k];
    if (p.x() < x0 || p.x() > x1 || p.y() < y0 || p.y() > y1) out.push_back(static_cast<Keypoint>(k));
  }
  return out;
}

Rig build_rig(const BinaryMask& mask, const JointSet17& joints, const TriangulateOptions& options) {
  const Polygon poly = staged("contour", [&] { return trace_contour(mask); });
  CharacterMesh mesh = staged("mesh", [&] { return triangulate(poly, mask, options); });
  Skeleton skeleton = staged("skeleton", [&] {
    if (!joints.finite()) throw Error(ErrorKind::validation, "joint coordinates must be finite");
    return build_skeleton(joints);
  });
  mesh = staged("skeleton", [&] { return assign_groups(std::move(mesh), skeleton); });
  return {std::move(mesh), std::move(skeleton)};
}

Character load_character(const CharacterConfig& cfg) {
  return staged("load", [&] {
    Character c;
    c.texture = load_image(cfg.image);
    c.mask = gray_to_mask(decode_gray_png(read_file(cfg.mask)));
    if (c.texture.width() != c.mask.width() || c.texture.height() != c.mask.height())
      throw Error(ErrorKind::validation, "texture and mask sizes differ");
    c.joints = cfg.joints;
    c.excluded = cfg.excluded;
    c.render_order = cfg.render_order;
    return c;
  });
}

Animation animate_plan(const Character& character, const Rig& rig, const RetargetPlan& plan,
                       const RenderOrder& order, const AnimateOptions& options) {
  Animation a;
  a.plan = plan;
  a.rig = rig;
  const HandleSet handles = staged("bind", [&] {
    BindOptions bind;
    for (Keypoint k : character.excluded)
      if (const auto j = skel_joint_of(k)) bind.excluded.push_back(*j);
    bind.exclude_unbindable = true;
    return bind_handles(rig.mesh, rig.skeleton, bind);
  });
  const ArapSolver solver = staged("arap", [&] { return build_solver(rig.mesh, handles); });
  const std::size_t n = static_cast<std::size_t>(plan.frame_count());
  a.deformed.resize(n);
  staged("arap", [&] {
    parallel_for(n, [&](std::size_t f) {
      const SkeletonPose pose = pose_skeleton(rig.skeleton, plan.angles[f], plan.root_offsets[f]);
      a.deformed[f] = solver.solve(handle_targets(handles, rig.mesh, rig.skeleton, pose));
    });
    return 0;
  });
  a.viewport = staged("render", [&] {
    const Viewport fitted = fit_viewport(character.texture.width(), character.texture.height(),
                                         a.deformed, options.viewport.transparent);
    return apply_overrides(fitted, options.viewport);
  });
  a.output.frame_time = plan.frame_time;
  a.output.frames.resize(n);
  staged("render", [&] {
    parallel_for(n, [&](std::size_t f) {
      a.output.frames[f] =
          rasterize_frame(rig.mesh, a.deformed[f], character.texture, order, a.viewport);
    });
    return 0;
  });
  return a;
}

Animation animate(const Character& character, const MotionClip& clip, RetargetConfig cfg,
                  const AnimateOptions& options) {
  if (options.twisted) cfg.twisted = *options.twisted;
  const JointSet17 joints = effective_joints(character.joints, character.excluded,
                                             character.mask.width(), character.mask.height());
  const Rig rig = build_rig(character.mask, joints, options.triangulate);
  const RetargetPlan plan = staged("retarget", [&] { return build_plan(clip, rig.skeleton, cfg); });
  const RenderOrder order = character.render_order.value_or(cfg.render_order);
  return animate_plan(character, rig, plan, order, options);
}

Bytes render_gif(const Character& character, const MotionClip& clip, const RetargetConfig& cfg,
                 const AnimateOptions& options) {
  const Animation a = animate(character, clip, cfg, options);
  return staged("export", [&] { return encode_gif(a.output.frames, a.output.frame_time); });
}

SegmentCommandResult cmd_segment(const fs::path& image, std::optional<BBox> box,
                                 const SegmentParams& params, const fs::path& out_dir) {
  SegmentCommandResult r;
  const RasterImage img = staged("load", [&] { return load_image(image); });
  r.segmentation = segment_image(img, box, params);
  const Segmentation& s = r.segmentation;
  const Polygon contour = staged("contour", [&] { return trace_contour(s.mask); });
  staged("export", [&] {
    fs::create_directories(out_dir);
    r.mask = out_dir / "mask.png";
    r.texture = out_dir / "texture.png";
    r.contour = out_dir / "contour.json";
    r.character_config = out_dir / "character.json";
    write_file(r.mask, encode_png(mask_to_gray(s.mask)));
    write_file(r.texture, encode_png(s.texture));
    nlohmann::ordered_json c;
    c["version"] = kSchemaVersion;
    c["bbox"] = {s.box.x, s.box.y, s.box.w, s.box.h};
    c["size"] = {s.mask.width(), s.mask.height()};
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const Point2& p : contour.vertices) pts.push_back({p.x(), p.y()});
    c["contour"] = pts;
    save_text(r.contour, c.dump(2) + "\n");
    CharacterConfig cfg;
    cfg.image = "texture.png";
    cfg.mask = "mask.png";
    cfg.joints = default_joint_template(BBox{0, 0, s.mask.width(), s.mask.height()});
    save_text(r.character_config, write_character_config(cfg));
    return 0;
  });
  return r;
}

RigCommandResult cmd_rig(const fs::path& character_config, const fs::path& out_dir) {
  const CharacterConfig cfg = staged("config", [&] { return load_character_config(character_config); });
  const Character c = load_character(cfg);
  RigCommandResult r;
  r.rig = build_rig(c.mask, effective_joints(c.joints, c.excluded, c.mask.width(), c.mask.height()));
  staged("export", [&] {
    fs::create_directories(out_dir);
    r.mesh = out_dir / "mesh.json";
    r.skeleton = out_dir / "skeleton.json";
    save_text(r.mesh, write_mesh(r.rig.mesh));
    save_text(r.skeleton, write_skeleton(r.rig.skeleton));
    return 0;
  });
  return r;
}

std::vector<fs::path> cmd_animate(const fs::path& scene, std::optional<bool> twisted,
                                  std::optional<OutputFormat> format,
                                  std::optional<fs::path> output) {
  const SceneSpec spec = staged("config", [&] { return load_scene_spec(scene); });
  const CharacterConfig ccfg = staged("config", [&] { return load_character_config(spec.character); });
  const RetargetDocument rdoc = staged("config", [&] { return load_retarget_document(spec.retarget); });
  const MotionClip clip = staged("motion", [&] { return load_bvh(rdoc.clip); });
  const Character character = load_character(ccfg);
  AnimateOptions options;
  options.viewport = spec.viewport;
  options.twisted = twisted;
  const Animation a = animate(character, clip, rdoc.config, options);
  const OutputFormat fmt = format.value_or(spec.format);
  const fs::path out = output.value_or(spec.output);
  return staged("export", [&] {
    if (fmt == OutputFormat::png) return export_png_sequence(a.output, out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    export_gif(a.output, out);
    return std::vector<fs::path>{out};
  });
}

}  // namespace sketchanim
