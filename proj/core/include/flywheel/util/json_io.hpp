#pragma once

#include <filesystem>
#include <set>
#include <string>

#include "json.hpp"

namespace flywheel {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Fail-closed schema guard: every key in `j` must be in `allowed`.
void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& context);

/// Rejects missing/mistyped version fields and versions != expected.
void check_version(const Json& j, int expected, const std::string& context);

}  // namespace flywheel
