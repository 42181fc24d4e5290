#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "flywheel/math/tensor.hpp"

namespace flywheel::math {

/// Self-describing parameter container: named tensors plus string metadata,
/// written as a versioned binary file (64-bit little-endian values).
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::map<std::string, Tensor> tensors;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Order-stable content hash; used to verify frozen policies.
uint64_t fingerprint(const Checkpoint& ck);

}  // namespace flywheel::math
