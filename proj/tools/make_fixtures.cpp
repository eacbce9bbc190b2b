// Writes the bundled motion gallery and a sample drawing.

#include "synth.hpp"

#include "sketchanim/config.hpp"
#include "sketchanim/image_io.hpp"
#include "sketchanim/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace sketchanim;

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("assets");
  const fs::path motions = root / "motions";
  fs::create_directories(motions);
  nlohmann::ordered_json manifest;
  manifest["version"] = kSchemaVersion;
  manifest["motions"] = nlohmann::ordered_json::array();
  for (const auto& c : fixtures::gallery_clips()) {
    save_text(motions / (c.id + ".bvh"), serialize_bvh(c.make()));
    manifest["motions"].push_back({{"id", c.id}, {"name", c.name}, {"clip", c.id + ".bvh"}});
  }
  save_text(motions / "motions.json", manifest.dump(2) + "\n");

  const fs::path drawings = root / "drawings";
  fs::create_directories(drawings);
  write_file(drawings / "outline_figure.png", encode_png(fixtures::make_figure({}).image));
  fixtures::FigureSpec stick;
  stick.style = fixtures::FigureStyle::stick;
  stick.stroke_width = 3;
  write_file(drawings / "stick_figure.png", encode_png(fixtures::make_figure(stick).image));
  // Example character with the generator's joints, plus a scene per clip.
  const fs::path character = root / "character";
  const fixtures::SyntheticFigure fig = fixtures::make_figure({});
  cmd_segment(drawings / "outline_figure.png", std::nullopt, {}, character);
  CharacterConfig cfg = read_character_config(load_text(character / "character.json"));
  cfg.joints = fig.joints;
  save_text(character / "character.json", write_character_config(cfg));
  for (const auto& c : fixtures::gallery_clips()) {
    RetargetDocument doc;
    doc.clip = "../motions/" + c.id + ".bvh";
    save_text(character / (c.id + ".retarget.json"), write_retarget_document(doc));
    SceneSpec scene;
    scene.character = "character.json";
    scene.retarget = c.id + ".retarget.json";
    scene.output = "out/" + c.id + ".gif";
    save_text(character / (c.id + ".scene.json"), write_scene_spec(scene));
  }
  std::cout << "wrote " << motions.string() << " and " << drawings.string() << "\n";
  return 0;
}
