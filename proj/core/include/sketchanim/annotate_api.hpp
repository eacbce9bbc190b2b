#pragma once

#include "sketchanim/bvh.hpp"
#include "sketchanim/pipeline.hpp"
#include "sketchanim/retarget.hpp"
#include "sketchanim/rig.hpp"
#include "sketchanim/segment.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace sketchanim {

/// One clip of the static motion gallery.
struct MotionEntry {
  std::string id;
  std::string name;
  MotionClip clip;
  RetargetConfig config;
};

/// motions.json: {"version": "1", "motions": [{"id", "name", "clip", "retarget"?}]}
/// with paths relative to the manifest. "retarget" names a retarget document
/// whose settings (not its clip) apply to the entry.
std::vector<MotionEntry> load_gallery(const std::filesystem::path& manifest);

enum class AnnotationStage { bbox, mask, joints, motion };
std::string_view to_string(AnnotationStage s);

struct AnnotationDoc {
  std::string id;
  std::string image;  // route serving the uploaded image
  int image_width = 0;
  int image_height = 0;
  BBox bbox;
  BinaryMask mask;
  JointSet17 joints;
  std::vector<Keypoint> excluded;
  std::optional<std::string> motion;
  AnnotationStage stage = AnnotationStage::bbox;
  std::vector<std::string> warnings;
};

struct ServiceOptions {
  std::size_t max_upload_bytes = 16u << 20;
  SegmentParams segment;
  /// Joints beyond the mask's foreground box grown by this fraction of its
  /// size on each side are excluded.
  double exclusion_margin = 0.1;
  /// Where POST .../save writes character configs; empty disables saving.
  std::filesystem::path save_dir;
};

/// Transport-independent request handling. Bodies are JSON text except the
/// upload (image bytes) and the render result (GIF bytes).
class AnnotationService {
 public:
  struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
  };

  AnnotationService(std::vector<MotionEntry> gallery, ServiceOptions options = {});

  Response health() const;
  Response create_session(std::string_view image_bytes);
  Response get_session(const std::string& id);
  Response get_image(const std::string& id);
  Response put_bbox(const std::string& id, const std::string& body);
  Response put_mask(const std::string& id, const std::string& body);
  Response put_joints(const std::string& id, const std::string& body);
  Response motions() const;
  Response render(const std::string& id, const std::string& body);
  Response reset(const std::string& id);
  Response save(const std::string& id);

  /// Snapshot of a session's document; nullopt for unknown ids.
  std::optional<AnnotationDoc> document(const std::string& id);
  const ServiceOptions& options() const { return options_; }

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);

  std::vector<MotionEntry> gallery_;
  ServiceOptions options_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

/// Document <-> JSON as used on the wire. The mask travels as row-major
/// run lengths starting with a background run.
std::string doc_to_json(const AnnotationDoc& doc);
std::vector<std::uint32_t> encode_runs(const BinaryMask& m);
BinaryMask decode_runs(int width, int height, const std::vector<std::uint32_t>& runs);

/// HTTP front end: every route lives under /v1; `asset_dir`, when set, is
/// served at the root for the editor bundle.
class AnnotationServer {
 public:
  AnnotationServer(std::shared_ptr<AnnotationService> service,
                   std::filesystem::path asset_dir = {});
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds; port 0 picks a free one. Returns the bound port, throws io on
  /// bind failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sketchanim
