#include "synth.hpp"

#include "sketchanim/config.hpp"
#include "sketchanim/contour.hpp"
#include "sketchanim/error.hpp"

#include <doctest.h>

#include <filesystem>

using namespace sketchanim;
namespace fs = std::filesystem;

namespace {

void expect_config_error(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

CharacterConfig sample_character() {
  CharacterConfig c;
  c.image = "texture.png";
  c.mask = "mask.png";
  c.joints = fixtures::make_figure({}).joints;
  c.joints[Keypoint::nose] = Point2(0.1, 1e-17);
  c.excluded = {Keypoint::left_ear, Keypoint::right_wrist};
  RenderOrder order = default_render_order();
  std::reverse(order.begin(), order.end());
  c.render_order = order;
  return c;
}

}  // namespace

TEST_CASE("character config round-trips byte for byte") {
  const CharacterConfig c = sample_character();
  const std::string text = write_character_config(c);
  const CharacterConfig back = read_character_config(text);
  CHECK(back.joints.points == c.joints.points);
  CHECK(back.excluded == c.excluded);
  CHECK(back.render_order == c.render_order);
  CHECK(back.image == c.image);
  CHECK(write_character_config(back) == text);
}

TEST_CASE("retarget document round-trips byte for byte") {
  RetargetDocument d;
  d.clip = "../motions/walk.bvh";
  d.config.upper_mode = PlaneMode::frontal;
  d.config.lower_mode = PlaneMode::sagittal;
  d.config.twisted = false;
  d.config.facing_sign = -1;
  d.config.vertical_root_motion = true;
  d.config.frame_start = 3;
  d.config.frame_end = 40;
  d.config.skeleton_map[MotionRole::head] = "Skull";
  const std::string text = write_retarget_document(d);
  const RetargetDocument back = read_retarget_document(text);
  CHECK(back.clip == d.clip);
  CHECK(back.config.skeleton_map == d.config.skeleton_map);
  CHECK(back.config.upper_mode == PlaneMode::frontal);
  CHECK(back.config.lower_mode == PlaneMode::sagittal);
  CHECK_FALSE(back.config.twisted);
  CHECK(back.config.facing_sign == -1);
  CHECK(back.config.frame_end == 40);
  CHECK(write_retarget_document(back) == text);
}

TEST_CASE("scene spec round-trips byte for byte") {
  SceneSpec s;
  s.character = "character.json";
  s.retarget = "walk.retarget.json";
  s.viewport.width = 640;
  s.viewport.scale = 0.75;
  s.viewport.translation = std::array<double, 2>{10.5, -3};
  s.viewport.background = std::array<int, 4>{1, 2, 3, 4};
  s.format = OutputFormat::png;
  s.output = "frames";
  const std::string text = write_scene_spec(s);
  const SceneSpec back = read_scene_spec(text);
  CHECK(back.viewport.width == 640);
  CHECK_FALSE(back.viewport.height.has_value());
  CHECK(back.viewport.translation == s.viewport.translation);
  CHECK(back.format == OutputFormat::png);
  CHECK(write_scene_spec(back) == text);
}

TEST_CASE("mesh and skeleton documents round-trip") {
  const auto fig = fixtures::make_figure({});
  const BinaryMask mask = fig.silhouette;
  const Skeleton skel = build_skeleton(fig.joints);
  const CharacterMesh mesh = assign_groups(triangulate(trace_contour(mask), mask), skel);
  const std::string mtext = write_mesh(mesh);
  const CharacterMesh mback = read_mesh(mtext);
  CHECK(mback.vertices == mesh.vertices);
  CHECK(mback.triangles == mesh.triangles);
  CHECK(mback.groups == mesh.groups);
  CHECK(write_mesh(mback) == mtext);
  const std::string stext = write_skeleton(skel);
  const Skeleton sback = read_skeleton(stext);
  CHECK(sback.joints == skel.joints);
  CHECK(sback.bones.size() == skel.bones.size());
  CHECK(write_skeleton(sback) == stext);
}

TEST_CASE("segment params keep defaults for absent keys") {
  const SegmentParams p = read_segment_params(R"({"c": 40, "polarity": "light_on_dark"})");
  CHECK(p.c == 40);
  CHECK(p.polarity == Polarity::light_on_dark);
  CHECK(p.block_radius == 8);
  CHECK(read_segment_params(write_segment_params(p)).c == 40);
  CHECK_THROWS_AS(read_segment_params(R"({"kernel_size": 4})"), Error);
}

TEST_CASE("malformed documents are config errors") {
  std::string text = write_character_config(sample_character());
  expect_config_error([] { read_character_config("{"); }, "character");
  expect_config_error([&] {
    std::string t = text;
    t.replace(t.find("\"1\""), 3, "\"2\"");
    read_character_config(t);
  }, "version");
  expect_config_error([&] {
    std::string t = text;
    t.replace(t.find("left_knee"), 9, "left_paw");
    read_character_config(t);
  }, "left_paw");
  expect_config_error([] { read_retarget_document(R"({"version": "1"})"); }, "clip");
  expect_config_error([] {
    read_retarget_document(R"({"version": "1", "clip": "a.bvh", "plane_mode": {"upper": "diagonal"}})");
  }, "diagonal");
  expect_config_error([] { read_scene_spec(R"({"version": "1", "character": "c.json"})"); }, "retarget");
}

TEST_CASE("loading resolves paths against the document") {
  const fs::path dir = fs::temp_directory_path() / "sketchanim_config_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "sub");
  CharacterConfig c = sample_character();
  save_text(dir / "sub" / "character.json", write_character_config(c));
  expect_config_error([&] { load_character_config(dir / "sub" / "character.json"); }, "texture.png");
  save_text(dir / "sub" / "texture.png", "x");
  save_text(dir / "sub" / "mask.png", "x");
  const CharacterConfig loaded = load_character_config(dir / "sub" / "character.json");
  CHECK(loaded.image == dir / "sub" / "texture.png");
  CHECK(load_text(dir / "sub" / "mask.png") == "x");
  fs::remove_all(dir);
}

TEST_CASE("bundled scenes load") {
  const fs::path root = SKETCHANIM_ASSETS;
  for (const char* id : {"walk", "jumping_jacks", "wave_hello", "mixed"}) {
    const SceneSpec s = load_scene_spec(root / "character" / (std::string(id) + ".scene.json"));
    CHECK(fs::exists(s.character));
    const RetargetDocument r = load_retarget_document(s.retarget);
    CHECK(fs::exists(r.clip));
  }
}
