#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchanim {

enum class ErrorKind {
  decode,
  io,
  invalid_box,
  empty_mask,
  degenerate_polygon,
  degenerate_rig,
  validation,
  parse,
  degenerate_pose,
  config,
  unbindable_joint,
  disconnected_mesh,
  factorization,
  missing_handle,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the engine. `kind` lets callers map failures onto
/// exit codes and HTTP statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised while running one stage of the animation pipeline; the stage
/// label is surfaced in CLI messages and HTTP 500 bodies.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace sketchanim
