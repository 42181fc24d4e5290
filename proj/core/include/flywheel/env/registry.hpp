#pragma once

#include <filesystem>
#include <vector>

#include "flywheel/env/types.hpp"

namespace flywheel::env {

/// Pool of registered environment ids with their physical parameters.
class EnvRegistry {
 public:
  static EnvRegistry builtin();
  static EnvRegistry load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const EnvParams& find(const std::string& id) const;
  bool contains(const std::string& id) const;
  const std::vector<EnvParams>& pool() const { return pool_; }
  void add(EnvParams p) { pool_.push_back(std::move(p)); }

 private:
  std::vector<EnvParams> pool_;
};

/// Catalog of object specs addressable by id.
class ObjectCatalog {
 public:
  static ObjectCatalog builtin();
  static ObjectCatalog load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  const ObjectSpec& find(const std::string& id) const;
  bool contains(const std::string& id) const;
  const std::vector<ObjectSpec>& items() const { return items_; }
  void add(ObjectSpec o) { items_.push_back(std::move(o)); }

 private:
  std::vector<ObjectSpec> items_;
};

}  // namespace flywheel::env
