#pragma once

#include <stdexcept>
#include <string>

namespace flywheel {

/// Bad or unsupported configuration input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pipeline stage failed hard (CLI exit code 3).
struct StageError : std::runtime_error {
  explicit StageError(const std::string& stage, const std::string& msg)
      : std::runtime_error("[" + stage + "] " + msg), stage_tag(stage) {}
  std::string stage_tag;
};

}  // namespace flywheel
