#include "flywheel/data/dataset_io.hpp"

#include <fstream>

#include "flywheel/util/errors.hpp"

namespace flywheel::data {

namespace {

const char* geometry_name(env::ObjectSpec::Geometry g) {
  using G = env::ObjectSpec::Geometry;
  switch (g) {
    case G::Disk: return "disk";
    case G::Box: return "box";
    case G::Capsule: return "capsule";
  }
  return "?";
}

env::ObjectSpec::Geometry geometry_from_name(const std::string& g) {
  using G = env::ObjectSpec::Geometry;
  if (g == "disk") return G::Disk;
  if (g == "box") return G::Box;
  if (g == "capsule") return G::Capsule;
  throw ConfigError("unknown geometry '" + g + "'");
}

Json object_to_json(const env::ObjectSpec& o) {
  return Json{{"id", o.id},           {"geometry", geometry_name(o.geometry)},
              {"dim_a", o.dim_a},     {"dim_b", o.dim_b},
              {"density_scale", o.density_scale}, {"category", o.category}};
}

env::ObjectSpec object_from_json(const Json& j) {
  env::ObjectSpec o;
  o.id = j.at("id").get<std::string>();
  o.geometry = geometry_from_name(j.at("geometry").get<std::string>());
  o.dim_a = j.at("dim_a").get<double>();
  o.dim_b = j.at("dim_b").get<double>();
  o.density_scale = j.at("density_scale").get<double>();
  o.category = j.value("category", "");
  o.validate();
  return o;
}

Json transition_to_json(const Transition& t) {
  Json j;
  j["obs"] = t.observation;
  j["steps"] = t.steps;
  j["adim"] = t.action_dim;
  j["actions"] = t.actions;
  if (!t.base_actions.empty()) j["base"] = t.base_actions;
  if (!t.residual_corrections.empty()) j["residual"] = t.residual_corrections;
  j["reward"] = t.reward;
  return j;
}

Transition transition_from_json(const Json& j) {
  Transition t;
  t.observation = j.at("obs").get<std::vector<double>>();
  t.steps = j.at("steps").get<int>();
  t.action_dim = j.at("adim").get<int>();
  t.actions = j.at("actions").get<std::vector<double>>();
  if (j.contains("base")) t.base_actions = j.at("base").get<std::vector<double>>();
  if (j.contains("residual")) t.residual_corrections = j.at("residual").get<std::vector<double>>();
  t.reward = j.at("reward").get<double>();
  if (static_cast<int64_t>(t.actions.size()) != static_cast<int64_t>(t.steps) * t.action_dim) {
    throw ConfigError("transition action block has wrong size");
  }
  return t;
}

Json trajectory_to_json(const Trajectory& t) {
  Json j;
  j["id"] = t.id;
  j["config"] = scenario_to_json(t.config);
  j["env_seed"] = t.env_seed;
  j["success"] = t.success;
  j["source"] = source_name(t.source);
  j["lineage"] = t.lineage;
  j["iteration_born"] = t.iteration_born;
  j["partial_final_chunk"] = t.partial_final_chunk;
  j["transitions"] = Json::array();
  for (const auto& tr : t.transitions) j["transitions"].push_back(transition_to_json(tr));
  return j;
}

Trajectory trajectory_from_json(const Json& j) {
  Trajectory t;
  t.id = j.at("id").get<std::string>();
  t.config = scenario_from_json(j.at("config"));
  t.env_seed = j.at("env_seed").get<uint64_t>();
  t.success = j.at("success").get<bool>();
  t.source = source_from_name(j.at("source").get<std::string>());
  t.lineage = j.at("lineage").get<std::vector<std::string>>();
  t.iteration_born = j.at("iteration_born").get<int>();
  t.partial_final_chunk = j.at("partial_final_chunk").get<bool>();
  for (const auto& tr : j.at("transitions")) t.transitions.push_back(transition_from_json(tr));
  return t;
}

}  // namespace

Json scenario_to_json(const env::ScenarioConfig& c) {
  Json j;
  j["object"] = object_to_json(c.object);
  j["environment_id"] = c.environment_id;
  j["pose"] = {c.spatial_pose.x, c.spatial_pose.z, c.spatial_pose.theta};
  if (c.second_object) j["second_object"] = object_to_json(*c.second_object);
  return j;
}

env::ScenarioConfig scenario_from_json(const Json& j) {
  env::ScenarioConfig c;
  c.object = object_from_json(j.at("object"));
  c.environment_id = j.at("environment_id").get<std::string>();
  const auto pose = j.at("pose").get<std::vector<double>>();
  if (pose.size() != 3) throw ConfigError("scenario pose must have 3 components");
  c.spatial_pose = {pose[0], pose[1], pose[2]};
  if (j.contains("second_object")) c.second_object = object_from_json(j.at("second_object"));
  return c;
}

Json ledger_to_json(const DiversityLedger& l) {
  return Json{{"O", l.objects},
              {"E", l.environments},
              {"P", l.poses},
              {"configs", l.configs},
              {"traj", l.trajectories}};
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
  Json header;
  header["format"] = "flywheel-dataset";
  header["version"] = 1;
  header["id"] = d.id();
  header["task"] = env::task_name(d.task());
  header["count"] = d.size();
  header["ledger"] = ledger_to_json(d.ledger());
  f << header.dump() << "\n";
  for (const auto& t : d.trajectories()) f << trajectory_to_json(t).dump() << "\n";
  if (!f) throw ConfigError("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line)) throw ConfigError(path.string() + ": empty file");

  Json header;
  try {
    header = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": bad header record: " + e.what());
  }
  if (header.value("format", "") != "flywheel-dataset") {
    throw ConfigError(path.string() + ": not a dataset file");
  }
  check_version(header, 1, path.string());

  Dataset d(header.at("id").get<std::string>(), env::task_from_name(header.at("task").get<std::string>()));
  const int64_t count = header.at("count").get<int64_t>();
  for (int64_t rec = 1; rec <= count; ++rec) {
    if (!std::getline(f, line)) {
      throw ConfigError(path.string() + ": record " + std::to_string(rec) + ": unexpected end of file");
    }
    try {
      d.add(trajectory_from_json(Json::parse(line)));
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ": record " + std::to_string(rec) + ": " + e.what());
    }
  }
  return d;
}

}  // namespace flywheel::data
