#include "sketchanim/annotate_api.hpp"
#include "sketchanim/config.hpp"
#include "sketchanim/error.hpp"
#include "sketchanim/gif.hpp"
#include "sketchanim/image_io.hpp"
#include "sketchanim/pipeline.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace sketchanim;

namespace {

std::optional<BBox> parse_bbox(const std::string& s) {
  if (s.empty()) return std::nullopt;
  BBox b;
  char c1 = 0, c2 = 0, c3 = 0;
  std::istringstream in(s);
  if (!(in >> b.x >> c1 >> b.y >> c2 >> b.w >> c3 >> b.h) || c1 != ',' || c2 != ',' || c3 != ',')
    throw CLI::ValidationError("--bbox", "expected x,y,w,h");
  return b;
}

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Animate children's drawings of human figures"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand("segment", "Extract the figure mask from a drawing");
  std::string seg_image, seg_bbox, seg_params, seg_out = ".";
  SegmentParams params;
  std::string polarity = "dark_on_light";
  seg->add_option("image", seg_image, "Drawing (PNG or JPEG)")->required()->check(CLI::ExistingFile);
  seg->add_option("--bbox", seg_bbox, "Crop box x,y,w,h (default: whole image)");
  seg->add_option("--params", seg_params, "SegmentParams JSON file")->check(CLI::ExistingFile);
  seg->add_option("--target-width", params.target_width, "Resize width in pixels");
  seg->add_option("--block-radius", params.block_radius, "Threshold window radius");
  seg->add_option("--c", params.c, "Threshold offset");
  seg->add_option("--kernel", params.kernel_size, "Morphology kernel size (odd)");
  seg->add_option("--connectivity", params.connectivity, "4 or 8");
  seg->add_option("--polarity", polarity, "dark_on_light or light_on_dark")
      ->check(CLI::IsMember({"dark_on_light", "light_on_dark"}));
  seg->add_option("-o,--out", seg_out, "Output directory");

  // rig
  auto* rig = app.add_subcommand("rig", "Build mesh and skeleton for a character config");
  std::string rig_config, rig_out;
  rig->add_option("character", rig_config, "character.json")->required()->check(CLI::ExistingFile);
  rig->add_option("-o,--out", rig_out, "Output directory (default: next to the config)");

  // animate
  auto* anim = app.add_subcommand("animate", "Render a scene to a GIF or PNG frames");
  std::string scene, mode, out_format, out_path;
  anim->add_option("scene", scene, "scene.json")->required()->check(CLI::ExistingFile);
  anim->add_option("--mode", mode, "twisted or single (default: from the retarget config)")
      ->check(CLI::IsMember({"twisted", "single"}));
  anim->add_option("--out", out_format, "gif or png (default: from the scene)")
      ->check(CLI::IsMember({"gif", "png"}));
  anim->add_option("-o,--output", out_path, "GIF file or PNG directory");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the annotation HTTP API");
  std::string host = "127.0.0.1", assets, motions, save_dir;
  int port = 8080;
  std::size_t max_upload = ServiceOptions{}.max_upload_bytes;
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--assets", assets, "Static editor bundle served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--motions", motions, "Gallery manifest (motions.json)")->check(CLI::ExistingFile);
  serve->add_option("--save-dir", save_dir, "Directory for editor-saved character configs");
  serve->add_option("--max-upload", max_upload, "Upload limit in bytes");

  // export-stimuli
  auto* stim = app.add_subcommand("export-stimuli", "Render twisted and single-plane GIF pairs");
  std::string stim_character, stim_motions, stim_out = "stimuli";
  stim->add_option("--character", stim_character, "character.json")->required()->check(CLI::ExistingFile);
  stim->add_option("--motions", stim_motions, "Gallery manifest (motions.json)")->required()->check(CLI::ExistingFile);
  stim->add_option("-o,--out", stim_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*seg) {
      if (!seg_params.empty()) {
        // Flags given on the command line win over the file.
        SegmentParams from_file = read_segment_params(load_text(seg_params));
        if (seg->count("--target-width") == 0) params.target_width = from_file.target_width;
        if (seg->count("--block-radius") == 0) params.block_radius = from_file.block_radius;
        if (seg->count("--c") == 0) params.c = from_file.c;
        if (seg->count("--kernel") == 0) params.kernel_size = from_file.kernel_size;
        if (seg->count("--connectivity") == 0) params.connectivity = from_file.connectivity;
        if (seg->count("--polarity") == 0) params.polarity = from_file.polarity;
      }
      if (seg->count("--polarity"))
        params.polarity = polarity == "dark_on_light" ? Polarity::dark_on_light : Polarity::light_on_dark;
      const auto r = cmd_segment(seg_image, parse_bbox(seg_bbox), params, seg_out);
      std::cout << r.character_config.string() << "\n";
    } else if (*rig) {
      const fs::path out = rig_out.empty() ? fs::path(rig_config).parent_path() : fs::path(rig_out);
      const auto r = cmd_rig(rig_config, out.empty() ? fs::path(".") : out);
      std::cout << r.mesh.string() << "\n" << r.skeleton.string() << "\n";
    } else if (*anim) {
      std::optional<bool> twisted;
      if (!mode.empty()) twisted = mode == "twisted";
      std::optional<OutputFormat> format;
      if (!out_format.empty()) format = out_format == "gif" ? OutputFormat::gif : OutputFormat::png;
      std::optional<fs::path> output;
      if (!out_path.empty()) output = out_path;
      const auto files = cmd_animate(scene, twisted, format, output);
      if (files.size() == 1) std::cout << "wrote " << files.front().string() << "\n";
      else if (!files.empty())
        std::cout << "wrote " << files.size() << " frames to " << files.front().parent_path().string() << "\n";
    } else if (*serve) {
      ServiceOptions opts;
      opts.max_upload_bytes = max_upload;
      opts.save_dir = save_dir;
      std::vector<MotionEntry> gallery;
      if (!motions.empty()) gallery = load_gallery(motions);
      auto service = std::make_shared<AnnotationService>(std::move(gallery), opts);
      AnnotationServer server(service, assets);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on http://" << host << ":" << bound << "/v1" << std::endl;
      server.listen();
      g_server = nullptr;
    } else if (*stim) {
      const CharacterConfig cfg = load_character_config(stim_character);
      const Character character = load_character(cfg);
      fs::create_directories(stim_out);
      for (const MotionEntry& m : load_gallery(stim_motions)) {
        for (const bool twisted : {true, false}) {
          AnimateOptions opts;
          opts.twisted = twisted;
          const Bytes gif = render_gif(character, m.clip, m.config, opts);
          const fs::path path = fs::path(stim_out) / (m.id + (twisted ? "_twisted.gif" : "_single.gif"));
          write_file(path, gif);
          std::cout << path.string() << "\n";
        }
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
