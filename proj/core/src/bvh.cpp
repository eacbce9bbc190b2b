#include "sketchanim/bvh.hpp"

#include "sketchanim/error.hpp"
#include "sketchanim/image_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sketchanim {

namespace {

constexpr std::array<std::string_view, 6> kChannelNames = {
    "Xposition", "Yposition", "Zposition", "Xrotation", "Yrotation", "Zrotation"};

constexpr std::array<std::string_view, kMotionRoleCount> kRoleNames = {
    "root",      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist",  "left_hip",       "right_hip",  "left_knee",
    "right_knee", "left_ankle",   "right_ankle",    "head"};

struct Token {
  std::string_view text;
  int line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) {
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '\n') {
        ++line;
        ++i;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else {
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\r' &&
               text[j] != '\n')
          ++j;
        tokens_.push_back({text.substr(i, j - i), line});
        i = j;
      }
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek() const {
    if (done()) fail("unexpected end of file");
    return tokens_[pos_];
  }
  Token next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }
  void expect(std::string_view word) {
    const Token t = next();
    if (t.text != word)
      fail_at(t.line, "expected '" + std::string(word) + "', found '" + std::string(t.text) + "'");
  }
  double number() {
    const Token t = next();
    return parse_number(t);
  }
  int line() const { return done() ? last_line() : tokens_[pos_].line; }
  std::size_t position() const { return pos_; }
  const std::vector<Token>& tokens() const { return tokens_; }

  static double parse_number(const Token& t) {
    double v = 0.0;
    std::string_view s = t.text;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail_at(t.line, "invalid number '" + std::string(t.text) + "'");
    return v;
  }
  [[noreturn]] static void fail_at(int line, const std::string& msg) {
    throw Error(ErrorKind::parse, "bvh line " + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(last_line(), msg); }

 private:
  int last_line() const { return tokens_.empty() ? 1 : tokens_.back().line; }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void parse_joint(Lexer& lex, MotionClip& clip, int parent, std::string name) {
  const int index = static_cast<int>(clip.joints.size());
  clip.joints.push_back({});
  clip.joints[index].name = std::move(name);
  clip.joints[index].parent = parent;
  if (parent >= 0) clip.joints[parent].children.push_back(index);
  lex.expect("{");
  lex.expect("OFFSET");
  Point3 off;
  for (int k = 0; k < 3; ++k) off[k] = lex.number();
  clip.joints[index].offset = off;
  if (lex.peek().text == "CHANNELS") {
    lex.next();
    const Token count_tok = lex.next();
    const double count = Lexer::parse_number(count_tok);
    if (count < 0 || count > 6 || count != std::floor(count))
      Lexer::fail_at(count_tok.line, "invalid channel count");
    clip.joints[index].channel_offset = clip.channel_count;
    for (int k = 0; k < static_cast<int>(count); ++k) {
      const Token t = lex.next();
      bool found = false;
      for (int c = 0; c < 6; ++c) {
        if (kChannelNames[c] == t.text) {
          clip.joints[index].channels.push_back(static_cast<Channel>(c));
          found = true;
        }
      }
      if (!found) Lexer::fail_at(t.line, "unknown channel '" + std::string(t.text) + "'");
    }
    clip.channel_count += static_cast<int>(count);
  } else {
    clip.joints[index].channel_offset = clip.channel_count;
  }
  while (true) {
    const Token t = lex.next();
    if (t.text == "}") return;
    if (t.text == "JOINT") {
      parse_joint(lex, clip, index, std::string(lex.next().text));
    } else if (t.text == "End") {
      lex.expect("Site");
      const int end = static_cast<int>(clip.joints.size());
      clip.joints.push_back({});
      clip.joints[end].name = clip.joints[index].name + "_End";
      clip.joints[end].parent = index;
      clip.joints[end].end_site = true;
      clip.joints[end].channel_offset = clip.channel_count;
      clip.joints[index].children.push_back(end);
      lex.expect("{");
      lex.expect("OFFSET");
      for (int k = 0; k < 3; ++k) clip.joints[end].offset[k] = lex.number();
      lex.expect("}");
    } else {
      Lexer::fail_at(t.line, "unexpected token '" + std::string(t.text) + "' in joint block");
    }
  }
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void write_joint(const MotionClip& clip, int index, int depth, std::string& out) {
  const BvhJoint& j = clip.joints[index];
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  auto offset_line = [&](const std::string& ind) {
    out += ind + "OFFSET";
    for (int k = 0; k < 3; ++k) {
      out += ' ';
      append_number(out, j.offset[k]);
    }
    out += '\n';
  };
  if (j.end_site) {
    out += indent + "End Site\n" + indent + "{\n";
    offset_line(indent + "  ");
    out += indent + "}\n";
    return;
  }
  out += indent + (j.parent < 0 ? "ROOT " : "JOINT ") + j.name + "\n" + indent + "{\n";
  offset_line(indent + "  ");
  if (!j.channels.empty()) {
    out += indent + "  CHANNELS " + std::to_string(j.channels.size());
    for (Channel c : j.channels) out += " " + std::string(to_string(c));
    out += '\n';
  }
  for (int child : j.children) write_joint(clip, child, depth + 1, out);
  out += indent + "}\n";
}

Eigen::Matrix3d axis_rotation(Channel c, double degrees) {
  const double rad = degrees * M_PI / 180.0;
  switch (c) {
    case Channel::x_rotation: return Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitX()).toRotationMatrix();
    case Channel::y_rotation: return Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitY()).toRotationMatrix();
    case Channel::z_rotation: return Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    default: return Eigen::Matrix3d::Identity();
  }
}

}  // namespace

std::string_view to_string(Channel c) { return kChannelNames[static_cast<int>(c)]; }

std::optional<int> MotionClip::find(std::string_view name) const {
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

MotionClip parse_bvh(std::string_view text) {
  Lexer lex(text);
  MotionClip clip;
  if (lex.done()) Lexer::fail_at(1, "empty file");
  lex.expect("HIERARCHY");
  lex.expect("ROOT");
  parse_joint(lex, clip, -1, std::string(lex.next().text));
  if (lex.done()) lex.fail("missing MOTION section");
  lex.expect("MOTION");

  // Accept both "Frames: N" and "Frames : N".
  const Token frames_tok = lex.next();
  if (frames_tok.text == "Frames") lex.expect(":");
  else if (frames_tok.text != "Frames:")
    Lexer::fail_at(frames_tok.line, "expected 'Frames:'");
  const Token count_tok = lex.next();
  const double frames = Lexer::parse_number(count_tok);
  if (frames < 0 || frames != std::floor(frames))
    Lexer::fail_at(count_tok.line, "frame count must be a non-negative integer");
  clip.frame_count = static_cast<int>(frames);

  lex.expect("Frame");
  const Token time_tok = lex.next();
  if (time_tok.text == "Time") lex.expect(":");
  else if (time_tok.text != "Time:")
    Lexer::fail_at(time_tok.line, "expected 'Frame Time:'");
  const Token ft = lex.next();
  clip.frame_time = Lexer::parse_number(ft);
  if (!(clip.frame_time > 0)) Lexer::fail_at(ft.line, "frame time must be positive");

  // Remaining tokens are data rows, one frame per line.
  const auto& toks = lex.tokens();
  std::size_t i = lex.position();
  int rows = 0;
  clip.data.reserve(static_cast<std::size_t>(clip.frame_count) * clip.channel_count);
  while (i < toks.size()) {
    const int line = toks[i].line;
    std::size_t j = i;
    while (j < toks.size() && toks[j].line == line) ++j;
    if (static_cast<int>(j - i) != clip.channel_count)
      Lexer::fail_at(line, "expected " + std::to_string(clip.channel_count) +
                               " channel values, found " + std::to_string(j - i));
    if (rows == clip.frame_count)
      Lexer::fail_at(line, "more data rows than the declared " +
                               std::to_string(clip.frame_count) + " frames");
    for (std::size_t k = i; k < j; ++k) clip.data.push_back(Lexer::parse_number(toks[k]));
    ++rows;
    i = j;
  }
  if (rows != clip.frame_count)
    Lexer::fail_at(toks.empty() ? 1 : toks.back().line,
                   "declared " + std::to_string(clip.frame_count) + " frames but found " +
                       std::to_string(rows) + " data rows");
  return clip;
}

MotionClip load_bvh(const std::string& path) {
  const Bytes bytes = read_file(path);
  return parse_bvh(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string serialize_bvh(const MotionClip& clip) {
  std::string out = "HIERARCHY\n";
  if (!clip.joints.empty()) write_joint(clip, 0, 0, out);
  out += "MOTION\nFrames: " + std::to_string(clip.frame_count) + "\nFrame Time: ";
  append_number(out, clip.frame_time);
  out += '\n';
  for (int f = 0; f < clip.frame_count; ++f) {
    const double* row = clip.frame(f);
    for (int c = 0; c < clip.channel_count; ++c) {
      if (c) out += ' ';
      append_number(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<Eigen::Isometry3d> joint_transforms(const MotionClip& clip, int frame) {
  if (frame < 0 || frame >= clip.frame_count)
    throw Error(ErrorKind::validation, "frame " + std::to_string(frame) + " out of range");
  const double* row = clip.frame(frame);
  std::vector<Eigen::Isometry3d> world(clip.joints.size());
  for (std::size_t i = 0; i < clip.joints.size(); ++i) {
    const BvhJoint& j = clip.joints[i];
    Point3 translation = j.offset;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    for (std::size_t k = 0; k < j.channels.size(); ++k) {
      const double v = row[j.channel_offset + k];
      switch (j.channels[k]) {
        case Channel::x_position: translation.x() += v; break;
        case Channel::y_position: translation.y() += v; break;
        case Channel::z_position: translation.z() += v; break;
        default: rotation = rotation * axis_rotation(j.channels[k], v); break;
      }
    }
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.linear() = rotation;
    local.translation() = translation;
    world[i] = j.parent < 0 ? local : world[j.parent] * local;
  }
  return world;
}

std::vector<Point3> forward_kinematics(const MotionClip& clip, int frame) {
  const auto world = joint_transforms(clip, frame);
  std::vector<Point3> out(world.size());
  for (std::size_t i = 0; i < world.size(); ++i) out[i] = world[i].translation();
  return out;
}

std::map<std::string, Point3> forward_kinematics_named(const MotionClip& clip, int frame) {
  const auto pos = forward_kinematics(clip, frame);
  std::map<std::string, Point3> out;
  for (std::size_t i = 0; i < pos.size(); ++i) out[clip.joints[i].name] = pos[i];
  return out;
}

std::string_view to_string(MotionRole r) { return kRoleNames[static_cast<int>(r)]; }

std::optional<MotionRole> motion_role_from_string(std::string_view name) {
  for (int i = 0; i < kMotionRoleCount; ++i)
    if (kRoleNames[i] == name) return static_cast<MotionRole>(i);
  return std::nullopt;
}

std::array<int, kMotionRoleCount> SkeletonMap::resolve(const MotionClip& clip) const {
  std::array<int, kMotionRoleCount> out{};
  for (int r = 0; r < kMotionRoleCount; ++r) {
    const auto idx = clip.find(names[r]);
    if (!idx)
      throw Error(ErrorKind::config, "skeleton map: joint '" + names[r] + "' for role '" +
                                         std::string(kRoleNames[r]) + "' is not in the clip");
    out[r] = *idx;
  }
  return out;
}

SkeletonMap SkeletonMap::standard() {
  SkeletonMap m;
  using R = MotionRole;
  m[R::root] = "Hips";
  m[R::left_shoulder] = "LeftArm";
  m[R::right_shoulder] = "RightArm";
  m[R::left_elbow] = "LeftForeArm";
  m[R::right_elbow] = "RightForeArm";
  m[R::left_wrist] = "LeftHand";
  m[R::right_wrist] = "RightHand";
  m[R::left_hip] = "LeftUpLeg";
  m[R::right_hip] = "RightUpLeg";
  m[R::left_knee] = "LeftLeg";
  m[R::right_knee] = "RightLeg";
  m[R::left_ankle] = "LeftFoot";
  m[R::right_ankle] = "RightFoot";
  m[R::head] = "Head";
  return m;
}

}  // namespace sketchanim
