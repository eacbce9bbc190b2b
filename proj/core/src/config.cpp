#include "sketchanim/config.hpp"

#include "sketchanim/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace sketchanim {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& doc, const std::string& msg) {
  throw Error(ErrorKind::config, doc + ": " + msg);
}

Json parse_doc(const std::string& text, const std::string& doc) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(doc, e.what());
  }
  if (!j.is_object()) fail(doc, "top level must be an object");
  const auto v = j.find("version");
  if (v == j.end() || !v->is_string()) fail(doc, "missing schema version");
  if (v->get<std::string>() != kSchemaVersion)
    fail(doc, "unsupported schema version '" + v->get<std::string>() + "'");
  return j;
}

const Json& need(const Json& j, const char* key, const std::string& doc) {
  const auto it = j.find(key);
  if (it == j.end()) fail(doc, std::string("missing key '") + key + "'");
  return *it;
}

double number(const Json& j, const std::string& doc, const std::string& what) {
  if (!j.is_number()) fail(doc, what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(doc, what + " must be finite");
  return v;
}

int integer(const Json& j, const std::string& doc, const std::string& what) {
  if (!j.is_number_integer()) fail(doc, what + " must be an integer");
  return j.get<int>();
}

std::string text(const Json& j, const std::string& doc, const std::string& what) {
  if (!j.is_string()) fail(doc, what + " must be a string");
  return j.get<std::string>();
}

bool boolean(const Json& j, const std::string& doc, const std::string& what) {
  if (!j.is_boolean()) fail(doc, what + " must be true or false");
  return j.get<bool>();
}

Json point(const Point2& p) { return Json::array({p.x(), p.y()}); }

Point2 read_point(const Json& j, const std::string& doc, const std::string& what) {
  if (!j.is_array() || j.size() != 2) fail(doc, what + " must be [x, y]");
  return {number(j[0], doc, what), number(j[1], doc, what)};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json render_order_json(const RenderOrder& order) {
  Json a = Json::array();
  for (BodyGroup g : order) a.push_back(std::string(to_string(g)));
  return a;
}

RenderOrder read_render_order(const Json& j, const std::string& doc) {
  if (!j.is_array()) fail(doc, "render_order must be a list");
  std::vector<BodyGroup> groups;
  for (const Json& e : j) {
    const auto g = body_group_from_string(text(e, doc, "render_order entry"));
    if (!g) fail(doc, "unknown body group '" + e.get<std::string>() + "'");
    groups.push_back(*g);
  }
  try {
    return render_order(groups);
  } catch (const Error& e) {
    fail(doc, e.what());
  }
}

Json joints_json(const JointSet17& joints) {
  Json j = Json::object();
  for (int k = 0; k < kKeypointCount; ++k)
    j[std::string(to_string(static_cast<Keypoint>(k)))] = point(joints.points[k]);
  return j;
}

JointSet17 read_joints(const Json& j, const std::string& doc) {
  if (!j.is_object()) fail(doc, "joints must be an object");
  if (j.size() != kKeypointCount) fail(doc, "joints must name exactly 17 keypoints");
  JointSet17 out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto k = keypoint_from_string(it.key());
    if (!k) fail(doc, "unknown joint '" + it.key() + "'");
    out[*k] = read_point(it.value(), doc, "joint '" + it.key() + "'");
  }
  return out;
}

PlaneMode read_plane_mode(const Json& j, const std::string& doc) {
  const std::string s = text(j, doc, "plane mode");
  for (PlaneMode m : {PlaneMode::automatic, PlaneMode::frontal, PlaneMode::sagittal})
    if (s == to_string(m)) return m;
  fail(doc, "unknown plane mode '" + s + "'");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

}  // namespace

std::string write_character_config(const CharacterConfig& cfg) {
  Json j;
  j["version"] = kSchemaVersion;
  j["image"] = cfg.image.generic_string();
  j["mask"] = cfg.mask.generic_string();
  j["joints"] = joints_json(cfg.joints);
  Json excluded = Json::array();
  for (Keypoint k : cfg.excluded) excluded.push_back(std::string(to_string(k)));
  j["excluded_joints"] = excluded;
  if (cfg.render_order) j["render_order"] = render_order_json(*cfg.render_order);
  return dump(j);
}

CharacterConfig read_character_config(const std::string& s) {
  const std::string doc = "character config";
  const Json j = parse_doc(s, doc);
  CharacterConfig cfg;
  cfg.image = text(need(j, "image", doc), doc, "image");
  cfg.mask = text(need(j, "mask", doc), doc, "mask");
  cfg.joints = read_joints(need(j, "joints", doc), doc);
  if (const auto it = j.find("excluded_joints"); it != j.end()) {
    if (!it->is_array()) fail(doc, "excluded_joints must be a list");
    for (const Json& e : *it) {
      const auto k = keypoint_from_string(text(e, doc, "excluded joint"));
      if (!k) fail(doc, "unknown joint '" + e.get<std::string>() + "'");
      cfg.excluded.push_back(*k);
    }
  }
  if (const auto it = j.find("render_order"); it != j.end())
    cfg.render_order = read_render_order(*it, doc);
  return cfg;
}

std::string write_retarget_document(const RetargetDocument& d) {
  const RetargetConfig& c = d.config;
  Json j;
  j["version"] = kSchemaVersion;
  j["clip"] = d.clip.generic_string();
  Json map = Json::object();
  for (int r = 0; r < kMotionRoleCount; ++r)
    map[std::string(to_string(static_cast<MotionRole>(r)))] = c.skeleton_map.names[r];
  j["skeleton_map"] = map;
  j["plane_mode"] = {{"upper", std::string(to_string(c.upper_mode))},
                     {"lower", std::string(to_string(c.lower_mode))}};
  j["twisted"] = c.twisted;
  j["facing_sign"] = c.facing_sign;
  j["vertical_root_motion"] = c.vertical_root_motion;
  j["render_order"] = render_order_json(c.render_order);
  j["frame_range"] = Json::array({c.frame_start, c.frame_end});
  return dump(j);
}

RetargetDocument read_retarget_document(const std::string& s) {
  const std::string doc = "retarget config";
  const Json j = parse_doc(s, doc);
  RetargetDocument d;
  RetargetConfig& c = d.config;
  d.clip = text(need(j, "clip", doc), doc, "clip");
  if (const auto it = j.find("skeleton_map"); it != j.end()) {
    if (!it->is_object()) fail(doc, "skeleton_map must be an object");
    for (auto e = it->begin(); e != it->end(); ++e) {
      const auto role = motion_role_from_string(e.key());
      if (!role) fail(doc, "unknown motion role '" + e.key() + "'");
      c.skeleton_map[*role] = text(e.value(), doc, "skeleton_map entry");
    }
  }
  if (const auto it = j.find("plane_mode"); it != j.end()) {
    if (!it->is_object()) fail(doc, "plane_mode must be an object");
    if (const auto u = it->find("upper"); u != it->end()) c.upper_mode = read_plane_mode(*u, doc);
    if (const auto l = it->find("lower"); l != it->end()) c.lower_mode = read_plane_mode(*l, doc);
  }
  if (const auto it = j.find("twisted"); it != j.end()) c.twisted = boolean(*it, doc, "twisted");
  if (const auto it = j.find("facing_sign"); it != j.end())
    c.facing_sign = integer(*it, doc, "facing_sign");
  if (const auto it = j.find("vertical_root_motion"); it != j.end())
    c.vertical_root_motion = boolean(*it, doc, "vertical_root_motion");
  if (const auto it = j.find("render_order"); it != j.end())
    c.render_order = read_render_order(*it, doc);
  if (const auto it = j.find("frame_range"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) fail(doc, "frame_range must be [start, end]");
    c.frame_start = integer((*it)[0], doc, "frame_range start");
    c.frame_end = integer((*it)[1], doc, "frame_range end");
  }
  try {
    c.validate();
  } catch (const Error& e) {
    fail(doc, e.what());
  }
  return d;
}

std::string write_scene_spec(const SceneSpec& spec) {
  Json j;
  j["version"] = kSchemaVersion;
  j["character"] = spec.character.generic_string();
  j["retarget"] = spec.retarget.generic_string();
  Json vp = Json::object();
  const ViewportOverrides& v = spec.viewport;
  if (v.width) vp["width"] = *v.width;
  if (v.height) vp["height"] = *v.height;
  if (v.scale) vp["scale"] = *v.scale;
  if (v.translation) vp["translation"] = Json::array({(*v.translation)[0], (*v.translation)[1]});
  if (v.background) vp["background"] = *v.background;
  vp["transparent"] = v.transparent;
  j["viewport"] = vp;
  j["output"] = {{"format", spec.format == OutputFormat::gif ? "gif" : "png"},
                 {"path", spec.output.generic_string()}};
  return dump(j);
}

SceneSpec read_scene_spec(const std::string& s) {
  const std::string doc = "scene spec";
  const Json j = parse_doc(s, doc);
  SceneSpec spec;
  spec.character = text(need(j, "character", doc), doc, "character");
  spec.retarget = text(need(j, "retarget", doc), doc, "retarget");
  if (const auto it = j.find("viewport"); it != j.end()) {
    if (!it->is_object()) fail(doc, "viewport must be an object");
    ViewportOverrides& v = spec.viewport;
    const Json& vp = *it;
    if (vp.contains("width")) v.width = integer(vp["width"], doc, "viewport width");
    if (vp.contains("height")) v.height = integer(vp["height"], doc, "viewport height");
    if (vp.contains("scale")) v.scale = number(vp["scale"], doc, "viewport scale");
    if (vp.contains("translation")) {
      const Point2 t = read_point(vp["translation"], doc, "viewport translation");
      v.translation = std::array<double, 2>{t.x(), t.y()};
    }
    if (vp.contains("background")) {
      const Json& b = vp["background"];
      if (!b.is_array() || b.size() != 4) fail(doc, "background must be [r, g, b, a]");
      std::array<int, 4> c{};
      for (int i = 0; i < 4; ++i) {
        c[i] = integer(b[i], doc, "background channel");
        if (c[i] < 0 || c[i] > 255) fail(doc, "background channel out of range");
      }
      v.background = c;
    }
    if (vp.contains("transparent")) v.transparent = boolean(vp["transparent"], doc, "transparent");
  }
  const Json& out = need(j, "output", doc);
  if (!out.is_object()) fail(doc, "output must be an object");
  const std::string format = text(need(out, "format", doc), doc, "output format");
  if (format == "gif") spec.format = OutputFormat::gif;
  else if (format == "png") spec.format = OutputFormat::png;
  else fail(doc, "output format must be gif or png");
  spec.output = text(need(out, "path", doc), doc, "output path");
  return spec;
}

std::string write_mesh(const CharacterMesh& mesh) {
  Json j;
  j["version"] = kSchemaVersion;
  Json v = Json::array(), t = Json::array(), uv = Json::array(), g = Json::array();
  for (const Point2& p : mesh.vertices) v.push_back(point(p));
  for (const auto& tri : mesh.triangles) t.push_back(Json::array({tri[0], tri[1], tri[2]}));
  for (const Point2& p : mesh.uvs) uv.push_back(point(p));
  for (BodyGroup b : mesh.groups) g.push_back(std::string(to_string(b)));
  j["vertices"] = v;
  j["triangles"] = t;
  j["uvs"] = uv;
  j["groups"] = g;
  return dump(j);
}

CharacterMesh read_mesh(const std::string& s) {
  const std::string doc = "mesh";
  const Json j = parse_doc(s, doc);
  CharacterMesh mesh;
  for (const Json& p : need(j, "vertices", doc)) mesh.vertices.push_back(read_point(p, doc, "vertex"));
  const int n = static_cast<int>(mesh.vertices.size());
  for (const Json& t : need(j, "triangles", doc)) {
    if (!t.is_array() || t.size() != 3) fail(doc, "triangle must list three indices");
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      tri[k] = integer(t[k], doc, "triangle index");
      if (tri[k] < 0 || tri[k] >= n) fail(doc, "triangle index out of range");
    }
    mesh.triangles.push_back(tri);
  }
  for (const Json& p : need(j, "uvs", doc)) mesh.uvs.push_back(read_point(p, doc, "uv"));
  for (const Json& g : need(j, "groups", doc)) {
    const auto b = body_group_from_string(text(g, doc, "group"));
    if (!b) fail(doc, "unknown body group '" + g.get<std::string>() + "'");
    mesh.groups.push_back(*b);
  }
  if (mesh.uvs.size() != mesh.vertices.size()) fail(doc, "uvs must match vertices");
  if (!mesh.groups.empty() && mesh.groups.size() != mesh.triangles.size())
    fail(doc, "groups must match triangles");
  return mesh;
}

std::string write_skeleton(const Skeleton& sk) {
  Json j;
  j["version"] = kSchemaVersion;
  Json joints = Json::object();
  for (int k = 0; k < kSkelJointCount; ++k)
    joints[std::string(to_string(static_cast<SkelJoint>(k)))] = point(sk.joints[k]);
  j["joints"] = joints;
  Json bones = Json::array();
  for (const Bone& b : sk.bones) {
    Json e;
    e["name"] = b.name;
    e["parent"] = std::string(to_string(b.parent));
    e["child"] = std::string(to_string(b.child));
    e["group"] = std::string(to_string(b.group));
    e["animated"] = b.rotated.has_value();
    e["rest_length"] = b.rest_length;
    bones.push_back(e);
  }
  j["bones"] = bones;
  return dump(j);
}

Skeleton read_skeleton(const std::string& s) {
  const std::string doc = "skeleton";
  const Json j = parse_doc(s, doc);
  Skeleton sk;
  const Json& joints = need(j, "joints", doc);
  if (!joints.is_object() || joints.size() != kSkelJointCount)
    fail(doc, "joints must name all 15 skeleton joints");
  for (auto it = joints.begin(); it != joints.end(); ++it) {
    const auto k = skel_joint_from_string(it.key());
    if (!k) fail(doc, "unknown joint '" + it.key() + "'");
    sk.joints[static_cast<int>(*k)] = read_point(it.value(), doc, "joint");
  }
  for (const Json& e : need(j, "bones", doc)) {
    Bone b;
    b.name = text(need(e, "name", doc), doc, "bone name");
    const auto parent = skel_joint_from_string(text(need(e, "parent", doc), doc, "bone parent"));
    const auto child = skel_joint_from_string(text(need(e, "child", doc), doc, "bone child"));
    const auto group = body_group_from_string(text(need(e, "group", doc), doc, "bone group"));
    if (!parent || !child || !group) fail(doc, "bone '" + b.name + "' has unknown references");
    b.parent = *parent;
    b.child = *child;
    b.group = *group;
    if (boolean(need(e, "animated", doc), doc, "animated")) {
      for (int r = 0; r < kRotatedBoneCount; ++r)
        if (to_string(static_cast<RotatedBone>(r)) == b.name) b.rotated = static_cast<RotatedBone>(r);
      if (!b.rotated) fail(doc, "unknown animated bone '" + b.name + "'");
    }
    b.rest_length = number(need(e, "rest_length", doc), doc, "rest_length");
    sk.bones.push_back(b);
  }
  return sk;
}

std::string write_segment_params(const SegmentParams& p) {
  Json j;
  j["version"] = kSchemaVersion;
  j["target_width"] = p.target_width;
  j["block_radius"] = p.block_radius;
  j["c"] = p.c;
  j["kernel_size"] = p.kernel_size;
  j["connectivity"] = p.connectivity;
  j["polarity"] = p.polarity == Polarity::dark_on_light ? "dark_on_light" : "light_on_dark";
  return dump(j);
}

SegmentParams read_segment_params(const std::string& s, SegmentParams p) {
  const std::string doc = "segment params";
  Json j;
  try {
    j = Json::parse(s);
  } catch (const nlohmann::json::parse_error& e) {
    fail(doc, e.what());
  }
  if (!j.is_object()) fail(doc, "top level must be an object");
  if (j.contains("version") && j["version"] != kSchemaVersion) fail(doc, "unsupported schema version");
  if (j.contains("target_width")) p.target_width = integer(j["target_width"], doc, "target_width");
  if (j.contains("block_radius")) p.block_radius = integer(j["block_radius"], doc, "block_radius");
  if (j.contains("c")) p.c = number(j["c"], doc, "c");
  if (j.contains("kernel_size")) p.kernel_size = integer(j["kernel_size"], doc, "kernel_size");
  if (j.contains("connectivity")) p.connectivity = integer(j["connectivity"], doc, "connectivity");
  if (j.contains("polarity")) {
    const std::string pol = text(j["polarity"], doc, "polarity");
    if (pol == "dark_on_light") p.polarity = Polarity::dark_on_light;
    else if (pol == "light_on_dark") p.polarity = Polarity::light_on_dark;
    else fail(doc, "polarity must be dark_on_light or light_on_dark");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail(doc, e.what());
  }
  return p;
}

CharacterConfig load_character_config(const fs::path& path) {
  CharacterConfig cfg = read_character_config(load_text(path));
  const fs::path base = path.parent_path();
  cfg.image = resolve(base, cfg.image);
  cfg.mask = resolve(base, cfg.mask);
  for (const fs::path& p : {cfg.image, cfg.mask})
    if (!fs::exists(p)) fail("character config", "referenced file not found: " + p.string());
  return cfg;
}

RetargetDocument load_retarget_document(const fs::path& path) {
  RetargetDocument d = read_retarget_document(load_text(path));
  d.clip = resolve(path.parent_path(), d.clip);
  return d;
}

SceneSpec load_scene_spec(const fs::path& path) {
  SceneSpec spec = read_scene_spec(load_text(path));
  const fs::path base = path.parent_path();
  spec.character = resolve(base, spec.character);
  spec.retarget = resolve(base, spec.retarget);
  spec.output = resolve(base, spec.output);
  return spec;
}

void save_text(const fs::path& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << s;
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

std::string load_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sketchanim
