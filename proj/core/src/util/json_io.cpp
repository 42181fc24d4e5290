#include "flywheel/util/json_io.hpp"

#include <fstream>

#include "flywheel/util/errors.hpp"

namespace flywheel {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
  f << j.dump(2) << "\n";
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(context + ": unknown key '" + it.key() + "'");
    }
  }
}

void check_version(const Json& j, int expected, const std::string& context) {
  if (!j.contains("version") || !j["version"].is_number_integer()) {
    throw ConfigError(context + ": missing integer 'version' field");
  }
  const int v = j["version"].get<int>();
  if (v != expected) {
    throw ConfigError(context + ": unsupported version " + std::to_string(v) + " (expected " +
                      std::to_string(expected) + ")");
  }
}

}  // namespace flywheel
