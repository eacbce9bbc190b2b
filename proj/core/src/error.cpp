#include "sketchanim/error.hpp"

namespace sketchanim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::decode: return "decode";
    case ErrorKind::io: return "io";
    case ErrorKind::invalid_box: return "invalid_box";
    case ErrorKind::empty_mask: return "empty_mask";
    case ErrorKind::degenerate_polygon: return "degenerate_polygon";
    case ErrorKind::degenerate_rig: return "degenerate_rig";
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::degenerate_pose: return "degenerate_pose";
    case ErrorKind::config: return "config";
    case ErrorKind::unbindable_joint: return "unbindable_joint";
    case ErrorKind::disconnected_mesh: return "disconnected_mesh";
    case ErrorKind::factorization: return "factorization";
    case ErrorKind::missing_handle: return "missing_handle";
  }
  return "unknown";
}

}  // namespace sketchanim
