#include "sketchanim/annotate_api.hpp"

#include "sketchanim/config.hpp"
#include "sketchanim/error.hpp"
#include "sketchanim/gif.hpp"
#include "sketchanim/image_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <span>

namespace sketchanim {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Response = AnnotationService::Response;

std::string_view to_string(AnnotationStage s) {
  switch (s) {
    case AnnotationStage::bbox: return "bbox";
    case AnnotationStage::mask: return "mask";
    case AnnotationStage::joints: return "joints";
    case AnnotationStage::motion: return "motion";
  }
  return "bbox";
}

std::vector<MotionEntry> load_gallery(const fs::path& manifest) {
  const Json j = Json::parse(load_text(manifest), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("version", "") != kSchemaVersion)
    throw Error(ErrorKind::config, "motion gallery: expected a version \"1\" object");
  const auto list = j.find("motions");
  if (list == j.end() || !list->is_array())
    throw Error(ErrorKind::config, "motion gallery: missing 'motions' list");
  const fs::path base = manifest.parent_path();
  std::vector<MotionEntry> out;
  for (const Json& e : *list) {
    if (!e.is_object() || !e.contains("id") || !e.contains("clip"))
      throw Error(ErrorKind::config, "motion gallery: entries need 'id' and 'clip'");
    MotionEntry m;
    m.id = e["id"].get<std::string>();
    m.name = e.value("name", m.id);
    m.clip = load_bvh(base / e["clip"].get<std::string>());
    if (e.contains("retarget"))
      m.config = load_retarget_document(base / e["retarget"].get<std::string>()).config;
    for (const MotionEntry& other : out)
      if (other.id == m.id) throw Error(ErrorKind::config, "motion gallery: duplicate id " + m.id);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::uint32_t> encode_runs(const BinaryMask& m) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (std::uint8_t b : m.bits()) {
    if (b != current) {
      runs.push_back(length);
      current = b;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

BinaryMask decode_runs(int width, int height, const std::vector<std::uint32_t>& runs) {
  if (width <= 0 || height <= 0) throw Error(ErrorKind::validation, "mask size must be positive");
  BinaryMask m(width, height);
  const std::size_t total = static_cast<std::size_t>(width) * height;
  std::size_t pos = 0;
  bool on = false;
  for (std::uint32_t r : runs) {
    if (pos + r > total) throw Error(ErrorKind::validation, "mask runs exceed the raster");
    for (std::uint32_t k = 0; k < r; ++k, ++pos)
      if (on) m.set(static_cast<int>(pos % width), static_cast<int>(pos / width), true);
    on = !on;
  }
  if (pos != total) throw Error(ErrorKind::validation, "mask runs do not cover the raster");
  return m;
}

namespace {

Json joints_json(const JointSet17& joints) {
  Json j = Json::object();
  for (int k = 0; k < kKeypointCount; ++k)
    j[std::string(to_string(static_cast<Keypoint>(k)))] = {joints.points[k].x(), joints.points[k].y()};
  return j;
}

Json doc_json(const AnnotationDoc& d) {
  Json j;
  j["id"] = d.id;
  j["image"] = d.image;
  j["image_size"] = {d.image_width, d.image_height};
  j["bbox"] = {{"x", d.bbox.x}, {"y", d.bbox.y}, {"w", d.bbox.w}, {"h", d.bbox.h}};
  j["mask"] = {{"width", d.mask.width()}, {"height", d.mask.height()}, {"runs", encode_runs(d.mask)}};
  j["joints"] = joints_json(d.joints);
  Json ex = Json::array();
  for (Keypoint k : d.excluded) ex.push_back(std::string(to_string(k)));
  j["excluded_joints"] = ex;
  j["motion"] = d.motion ? Json(*d.motion) : Json(nullptr);
  j["stage"] = std::string(to_string(d.stage));
  j["warnings"] = d.warnings;
  return j;
}

Response json_response(int status, const Json& j) { return {status, "application/json", j.dump()}; }

Response error_response(int status, const std::string& msg) {
  return json_response(status, Json{{"error", msg}});
}

Response stage_conflict(AnnotationStage current, std::string_view wanted) {
  return error_response(409, "session is at the " + std::string(to_string(current)) +
                                 " stage; " + std::string(wanted) +
                                 " edits are no longer allowed (reset to start over)");
}

std::optional<Json> parse_body(const std::string& body) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

std::optional<BBox> read_box(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  for (const char* k : {"x", "y", "w", "h"})
    if (!j.contains(k) || !j[k].is_number()) return std::nullopt;
  auto val = [&](const char* k) { return static_cast<int>(std::lround(j[k].get<double>())); };
  return BBox{val("x"), val("y"), val("w"), val("h")};
}

}  // namespace

std::string doc_to_json(const AnnotationDoc& doc) { return doc_json(doc).dump(); }

struct AnnotationService::Session {
  std::mutex mutex;
  RasterImage image;
  AnnotationDoc doc;
};

AnnotationService::AnnotationService(std::vector<MotionEntry> gallery, ServiceOptions options)
    : gallery_(std::move(gallery)), options_(std::move(options)) {
  options_.segment.validate();
}

std::shared_ptr<AnnotationService::Session> AnnotationService::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

namespace {

// Mask, template joints and warnings for the current bbox.
void recompute_crop(const RasterImage& image, const SegmentParams& params, AnnotationDoc& d) {
  d.warnings.clear();
  d.excluded.clear();
  const RasterImage cropped = crop(image, d.bbox);
  const GrayImage gray = to_grayscale(cropped);
  try {
    d.mask = extract_mask(gray, params);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::empty_mask) throw;
    const GrayImage resized = resize_to_width(gray, params.target_width);
    d.mask = BinaryMask(resized.width(), resized.height());
    d.warnings.push_back("no figure found; paint the figure with the pencil tool");
  }
  d.joints = default_joint_template(BBox{0, 0, d.mask.width(), d.mask.height()});
}

}  // namespace

Response AnnotationService::health() const {
  return json_response(200, Json{{"status", "ok"}, {"version", std::string(version())}});
}

Response AnnotationService::create_session(std::string_view bytes) {
  if (bytes.size() > options_.max_upload_bytes)
    return error_response(413, "upload exceeds " + std::to_string(options_.max_upload_bytes) + " bytes");
  auto s = std::make_shared<Session>();
  try {
    s->image = decode_image(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    return error_response(400, std::string("not a readable image: ") + e.what());
  }
  {
    std::lock_guard lock(sessions_mutex_);
    s->doc.id = "s" + std::to_string(next_id_++);
  }
  AnnotationDoc& d = s->doc;
  d.image = "/v1/sessions/" + d.id + "/image";
  d.image_width = s->image.width();
  d.image_height = s->image.height();
  d.bbox = BBox{0, 0, d.image_width, d.image_height};
  try {
    recompute_crop(s->image, options_.segment, d);
  } catch (const Error& e) {
    return error_response(400, e.what());
  }
  const Json body = doc_json(d);
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(d.id, s);
  }
  return json_response(201, body);
}

Response AnnotationService::get_session(const std::string& id) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  std::lock_guard lock(s->mutex);
  return json_response(200, doc_json(s->doc));
}

std::optional<AnnotationDoc> AnnotationService::document(const std::string& id) {
  const auto s = find(id);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mutex);
  return s->doc;
}

Response AnnotationService::get_image(const std::string& id) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  std::lock_guard lock(s->mutex);
  const Bytes png = encode_png(s->image);
  return {200, "image/png", std::string(png.begin(), png.end())};
}

Response AnnotationService::put_bbox(const std::string& id, const std::string& body) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  const auto j = parse_body(body);
  if (!j) return error_response(400, "body must be a JSON object");
  std::optional<BBox> box;
  if (j->contains("boxes")) {
    const Json& list = (*j)["boxes"];
    if (!list.is_array() || list.empty()) return error_response(400, "'boxes' must be a non-empty list");
    for (const Json& b : list) {
      const auto one = read_box(b);
      if (!one) return error_response(400, "each box needs numeric x, y, w, h");
      box = box ? union_box(*box, *one) : *one;
    }
  } else if (j->contains("bbox")) {
    box = read_box((*j)["bbox"]);
    if (!box) return error_response(400, "bbox needs numeric x, y, w, h");
  } else {
    return error_response(400, "expected 'bbox' or 'boxes'");
  }
  std::lock_guard lock(s->mutex);
  AnnotationDoc& d = s->doc;
  if (d.stage > AnnotationStage::bbox) return stage_conflict(d.stage, "bbox");
  const BBox clipped = clip_box(*box, d.image_width, d.image_height);
  if (box->w <= 0 || box->h <= 0 || clipped.w <= 0 || clipped.h <= 0)
    return error_response(422, "bounding box does not overlap the image");
  AnnotationDoc next = d;
  next.bbox = clipped;
  try {
    recompute_crop(s->image, options_.segment, next);
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  d = std::move(next);
  return json_response(200, doc_json(d));
}

Response AnnotationService::put_mask(const std::string& id, const std::string& body) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  const auto j = parse_body(body);
  if (!j) return error_response(400, "body must be a JSON object");
  std::lock_guard lock(s->mutex);
  AnnotationDoc& d = s->doc;
  if (d.stage > AnnotationStage::mask) return stage_conflict(d.stage, "mask");
  BinaryMask edited = d.mask;
  bool changed = false;
  try {
    if (j->contains("mask")) {
      const Json& m = (*j)["mask"];
      if (!m.is_object() || !m.contains("width") || !m.contains("height") || !m.contains("runs"))
        return error_response(400, "mask needs width, height and runs");
      if (m["width"] != d.mask.width() || m["height"] != d.mask.height())
        return error_response(422, "mask size must match the current crop");
      edited = decode_runs(d.mask.width(), d.mask.height(), m["runs"].get<std::vector<std::uint32_t>>());
      changed = true;
    }
    if (j->contains("strokes")) {
      const Json& strokes = (*j)["strokes"];
      if (!strokes.is_array()) return error_response(400, "'strokes' must be a list");
      for (const Json& st : strokes) {
        if (!st.is_object() || !st.contains("points") || !st["points"].is_array())
          return error_response(400, "each stroke needs a 'points' list");
        const std::string mode = st.value("mode", "add");
        if (mode != "add" && mode != "erase") return error_response(400, "stroke mode must be add or erase");
        const double radius = st.value("radius", 1.0);
        if (!std::isfinite(radius) || radius <= 0) return error_response(400, "stroke radius must be positive");
        std::vector<std::pair<double, double>> pts;
        for (const Json& p : st["points"]) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            return error_response(400, "stroke points must be [x, y]");
          pts.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        stamp_stroke(edited, pts, radius, mode == "add");
        changed = true;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, e.what());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  if (!changed) return json_response(200, doc_json(d));
  try {
    edited = reapply_fill_rules(edited, options_.segment.connectivity);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::empty_mask) throw;
    return error_response(422, "the edit leaves the mask empty; draw the figure with the pencil tool");
  }
  d.mask = std::move(edited);
  d.stage = AnnotationStage::mask;
  d.warnings.clear();
  return json_response(200, doc_json(d));
}

Response AnnotationService::put_joints(const std::string& id, const std::string& body) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  const auto j = parse_body(body);
  if (!j || !j->contains("joints")) return error_response(400, "expected {\"joints\": {...}}");
  const Json& list = (*j)["joints"];
  JointSet17 joints;
  std::array<bool, kKeypointCount> seen{};
  auto coord = [](const Json& v) {
    return v.is_number() ? v.get<double>() : std::numeric_limits<double>::quiet_NaN();
  };
  if (!list.is_object() || list.size() != kKeypointCount)
    return error_response(422, "exactly 17 named joints are required");
  for (auto it = list.begin(); it != list.end(); ++it) {
    const auto k = keypoint_from_string(it.key());
    if (!k) return error_response(422, "unknown joint '" + it.key() + "'");
    const Json& p = it.value();
    if (!p.is_array() || p.size() != 2) return error_response(422, "joint '" + it.key() + "' must be [x, y]");
    joints[*k] = Point2(coord(p[0]), coord(p[1]));
    seen[static_cast<int>(*k)] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    return error_response(422, "exactly 17 named joints are required");
  if (!joints.finite()) return error_response(422, "joint coordinates must be finite numbers");
  std::lock_guard lock(s->mutex);
  AnnotationDoc& d = s->doc;
  if (d.stage > AnnotationStage::joints) return stage_conflict(d.stage, "joint");
  d.joints = joints;
  d.excluded = far_joints(joints, d.mask, options_.exclusion_margin);
  d.stage = AnnotationStage::joints;
  return json_response(200, doc_json(d));
}

Response AnnotationService::motions() const {
  Json list = Json::array();
  for (const MotionEntry& m : gallery_)
    list.push_back({{"id", m.id},
                    {"name", m.name},
                    {"frames", m.clip.frame_count},
                    {"frame_time", m.clip.frame_time}});
  return json_response(200, Json{{"motions", list}});
}

Response AnnotationService::render(const std::string& id, const std::string& body) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  const auto j = parse_body(body);
  if (!j || !j->contains("motion") || !(*j)["motion"].is_string())
    return error_response(400, "expected {\"motion\": id, \"mode\": \"twisted\"|\"single\"}");
  const std::string motion = (*j)["motion"].get<std::string>();
  const auto entry = std::find_if(gallery_.begin(), gallery_.end(),
                                  [&](const MotionEntry& m) { return m.id == motion; });
  if (entry == gallery_.end()) return error_response(404, "unknown motion " + motion);
  std::optional<bool> twisted;
  if (j->contains("mode")) {
    const Json& mode = (*j)["mode"];
    if (mode == "twisted") twisted = true;
    else if (mode == "single") twisted = false;
    else return error_response(400, "mode must be twisted or single");
  }
  std::lock_guard lock(s->mutex);
  AnnotationDoc& d = s->doc;
  if (d.stage < AnnotationStage::joints)
    return error_response(409, "confirm the joints before rendering");
  Bytes gif;
  try {
    Character c;
    c.texture = crop_texture(s->image, d.bbox, d.mask.width());
    c.mask = d.mask;
    c.joints = d.joints;
    c.excluded = d.excluded;
    AnimateOptions opts;
    opts.twisted = twisted;
    gif = render_gif(c, entry->clip, entry->config, opts);
  } catch (const StageError& e) {
    return json_response(500, Json{{"error", e.what()}, {"stage", e.stage()}});
  } catch (const Error& e) {
    return json_response(500, Json{{"error", e.what()}, {"stage", "render"}});
  }
  d.motion = motion;
  d.stage = AnnotationStage::motion;
  return {200, "image/gif", std::string(gif.begin(), gif.end())};
}

Response AnnotationService::reset(const std::string& id) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  std::lock_guard lock(s->mutex);
  AnnotationDoc& d = s->doc;
  d.bbox = BBox{0, 0, d.image_width, d.image_height};
  d.motion.reset();
  d.stage = AnnotationStage::bbox;
  recompute_crop(s->image, options_.segment, d);
  return json_response(200, doc_json(d));
}

Response AnnotationService::save(const std::string& id) {
  const auto s = find(id);
  if (!s) return error_response(404, "unknown session " + id);
  if (options_.save_dir.empty()) return error_response(404, "saving is disabled on this server");
  std::lock_guard lock(s->mutex);
  const AnnotationDoc& d = s->doc;
  if (d.mask.empty()) return error_response(422, "cannot save an empty mask");
  const fs::path dir = options_.save_dir / d.id;
  try {
    fs::create_directories(dir);
    write_file(dir / "texture.png", encode_png(crop_texture(s->image, d.bbox, d.mask.width())));
    write_file(dir / "mask.png", encode_png(mask_to_gray(d.mask)));
    CharacterConfig cfg;
    cfg.image = "texture.png";
    cfg.mask = "mask.png";
    cfg.joints = d.joints;
    cfg.excluded = d.excluded;
    save_text(dir / "character.json", write_character_config(cfg));
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
  return json_response(200, Json{{"character", (dir / "character.json").string()}});
}

struct AnnotationServer::Impl {
  std::shared_ptr<AnnotationService> service;
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

}  // namespace

AnnotationServer::AnnotationServer(std::shared_ptr<AnnotationService> service, fs::path asset_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = std::move(service);
  auto& svr = impl_->server;
  AnnotationService& api = *impl_->service;
  // httplib answers 413 itself past this size; the service re-checks raw bodies.
  svr.set_payload_max_length(api.options().max_upload_bytes + (64u << 10));

  svr.Get("/v1/health", [&api](const httplib::Request&, httplib::Response& res) { send(res, api.health()); });
  svr.Get("/v1/motions", [&api](const httplib::Request&, httplib::Response& res) { send(res, api.motions()); });
  svr.Post("/v1/sessions", [&api](const httplib::Request& req, httplib::Response& res) {
    if (req.is_multipart_form_data()) {
      if (req.has_file("image")) return send(res, api.create_session(req.get_file_value("image").content));
      if (!req.files.empty()) return send(res, api.create_session(req.files.begin()->second.content));
      return send(res, error_response(400, "multipart upload has no file"));
    }
    send(res, api.create_session(req.body));
  });
  const std::string sid = R"(/v1/sessions/([A-Za-z0-9_-]+))";
  svr.Get(sid, [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.get_session(req.matches[1]));
  });
  svr.Get(sid + "/image", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.get_image(req.matches[1]));
  });
  svr.Put(sid + "/bbox", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.put_bbox(req.matches[1], req.body));
  });
  svr.Put(sid + "/mask", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.put_mask(req.matches[1], req.body));
  });
  svr.Put(sid + "/joints", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.put_joints(req.matches[1], req.body));
  });
  svr.Post(sid + "/render", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.render(req.matches[1], req.body));
  });
  svr.Post(sid + "/reset", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.reset(req.matches[1]));
  });
  svr.Post(sid + "/save", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.save(req.matches[1]));
  });
  if (!asset_dir.empty() && !svr.set_mount_point("/", asset_dir.string()))
    throw Error(ErrorKind::io, "asset directory not found: " + asset_dir.string());
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* msg = res.status == 404 ? "no such route" : httplib::status_message(res.status);
    res.set_content(Json{{"error", msg}}.dump(), "application/json");
  });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string msg = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      msg = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(Json{{"error", msg}}.dump(), "application/json");
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                              : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void AnnotationServer::listen() { impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace sketchanim
