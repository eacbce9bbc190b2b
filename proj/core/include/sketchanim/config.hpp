#pragma once

#include "sketchanim/mesh.hpp"
#include "sketchanim/retarget.hpp"
#include "sketchanim/rig.hpp"
#include "sketchanim/segment.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sketchanim {

// On-disk documents are UTF-8 JSON carrying "version": "1". Writers emit keys
// in a fixed order with shortest round-trip numbers, so write -> read -> write
// reproduces the same bytes.

inline constexpr const char* kSchemaVersion = "1";

/// Annotated character. `image` is the texture aligned with the mask (same
/// size); joints are in that pixel frame. Relative paths resolve against the
/// directory of the config file.
struct CharacterConfig {
  std::filesystem::path image;
  std::filesystem::path mask;
  JointSet17 joints;
  /// Joints the user dragged off the figure; they fall back to the template.
  std::vector<Keypoint> excluded;
  std::optional<RenderOrder> render_order;
};

/// Retarget document: the clip plus every RetargetConfig field.
struct RetargetDocument {
  std::filesystem::path clip;
  RetargetConfig config;
};

struct ViewportOverrides {
  std::optional<int> width;
  std::optional<int> height;
  std::optional<double> scale;
  std::optional<std::array<double, 2>> translation;
  std::optional<std::array<int, 4>> background;
  bool transparent = false;
};

enum class OutputFormat { gif, png };

struct SceneSpec {
  std::filesystem::path character;
  std::filesystem::path retarget;
  ViewportOverrides viewport;
  OutputFormat format = OutputFormat::gif;
  /// GIF file or PNG directory.
  std::filesystem::path output;
};

std::string write_character_config(const CharacterConfig& cfg);
CharacterConfig read_character_config(const std::string& text);
std::string write_retarget_document(const RetargetDocument& doc);
RetargetDocument read_retarget_document(const std::string& text);
std::string write_scene_spec(const SceneSpec& spec);
SceneSpec read_scene_spec(const std::string& text);
std::string write_mesh(const CharacterMesh& mesh);
CharacterMesh read_mesh(const std::string& text);
std::string write_skeleton(const Skeleton& skeleton);
Skeleton read_skeleton(const std::string& text);
std::string write_segment_params(const SegmentParams& params);
/// Keys absent from `text` keep the values in `base`.
SegmentParams read_segment_params(const std::string& text, SegmentParams base = {});

/// Reads a document and resolves its relative paths against the file's
/// directory. Character configs additionally require image and mask to exist.
CharacterConfig load_character_config(const std::filesystem::path& path);
RetargetDocument load_retarget_document(const std::filesystem::path& path);
SceneSpec load_scene_spec(const std::filesystem::path& path);

void save_text(const std::filesystem::path& path, const std::string& text);
std::string load_text(const std::filesystem::path& path);

}  // namespace sketchanim
