#pragma once

#include <filesystem>

#include "flywheel/data/dataset.hpp"
#include "flywheel/util/json_io.hpp"

namespace flywheel::data {

/// Dataset files are JSON Lines: a versioned header record followed by one
/// record per trajectory, numeric arrays at full 64-bit round-trip
/// precision. Malformed records are rejected with their record number.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

Json scenario_to_json(const env::ScenarioConfig& c);
env::ScenarioConfig scenario_from_json(const Json& j);
Json ledger_to_json(const DiversityLedger& l);

}  // namespace flywheel::data
