#include "flywheel/env/registry.hpp"

#include "flywheel/util/errors.hpp"
#include "flywheel/util/json_io.hpp"

namespace flywheel::env {

namespace {

ObjectSpec::Geometry geometry_from_name(const std::string& g) {
  if (g == "disk") return ObjectSpec::Geometry::Disk;
  if (g == "box") return ObjectSpec::Geometry::Box;
  if (g == "capsule") return ObjectSpec::Geometry::Capsule;
  throw ConfigError("unknown geometry '" + g + "'");
}

const char* geometry_name(ObjectSpec::Geometry g) {
  switch (g) {
    case ObjectSpec::Geometry::Disk: return "disk";
    case ObjectSpec::Geometry::Box: return "box";
    case ObjectSpec::Geometry::Capsule: return "capsule";
  }
  return "?";
}

ObjectSpec obj(const char* id, ObjectSpec::Geometry g, double a, double b, double d, const char* cat) {
  ObjectSpec o;
  o.id = id;
  o.geometry = g;
  o.dim_a = a;
  o.dim_b = b;
  o.density_scale = d;
  o.category = cat;
  o.validate();
  return o;
}

EnvParams envp(const char* id, double mu, double z0, double g) {
  EnvParams p;
  p.id = id;
  p.friction = mu;
  p.table_offset = z0;
  p.gravity = g;
  p.jitter = 0.02;
  return p;
}

}  // namespace

EnvRegistry EnvRegistry::builtin() {
  EnvRegistry r;
  r.add(envp("e00", 1.00, 0.000, 9.81));
  r.add(envp("e01", 1.10, 0.010, 9.60));
  r.add(envp("e02", 0.90, -0.010, 10.00));
  r.add(envp("e03", 1.20, 0.020, 9.40));
  r.add(envp("e04", 0.85, -0.020, 10.20));
  r.add(envp("e05", 1.05, 0.015, 9.90));
  r.add(envp("e06", 0.80, -0.015, 9.30));
  r.add(envp("e07", 1.15, 0.025, 10.30));
  r.add(envp("e08", 0.95, -0.025, 9.70));
  r.add(envp("e09", 0.82, 0.030, 10.40));
  r.add(envp("e10", 1.18, -0.030, 9.20));
  r.add(envp("e11", 0.88, 0.008, 10.10));
  return r;
}

EnvRegistry EnvRegistry::load(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  check_keys(j, {"version", "environments"}, "environment registry");
  check_version(j, 1, "environment registry");
  EnvRegistry r;
  for (const auto& e : j.at("environments")) {
    check_keys(e, {"id", "friction", "table_offset", "gravity", "jitter"}, "environment entry");
    EnvParams p;
    p.id = e.at("id").get<std::string>();
    p.friction = e.at("friction").get<double>();
    p.table_offset = e.at("table_offset").get<double>();
    p.gravity = e.at("gravity").get<double>();
    p.jitter = e.value("jitter", 0.0);
    r.add(std::move(p));
  }
  return r;
}

void EnvRegistry::save(const std::filesystem::path& path) const {
  Json j;
  j["version"] = 1;
  j["environments"] = Json::array();
  for (const auto& p : pool_) {
    j["environments"].push_back({{"id", p.id},
                                 {"friction", p.friction},
                                 {"table_offset", p.table_offset},
                                 {"gravity", p.gravity},
                                 {"jitter", p.jitter}});
  }
  write_json_file(path, j);
}

const EnvParams& EnvRegistry::find(const std::string& id) const {
  for (const auto& p : pool_) {
    if (p.id == id) return p;
  }
  throw ConfigError("environment id '" + id + "' is not registered");
}

bool EnvRegistry::contains(const std::string& id) const {
  for (const auto& p : pool_) {
    if (p.id == id) return true;
  }
  return false;
}

ObjectCatalog ObjectCatalog::builtin() {
  using G = ObjectSpec::Geometry;
  ObjectCatalog c;
  // Grasp family. disk_s is the seed object; disk_t..disk_l are its
  // geometry-similar neighbours, the rest span categories and masses.
  c.add(obj("disk_s", G::Disk, 0.025, 0.025, 1.00, "disk"));
  c.add(obj("disk_t", G::Disk, 0.020, 0.020, 1.20, "disk"));
  c.add(obj("disk_m", G::Disk, 0.030, 0.030, 0.90, "disk"));
  c.add(obj("disk_h", G::Disk, 0.027, 0.027, 1.55, "disk"));
  c.add(obj("disk_l", G::Disk, 0.022, 0.022, 0.60, "disk"));
  c.add(obj("disk_xl", G::Disk, 0.035, 0.035, 0.80, "disk"));
  c.add(obj("box_s", G::Box, 0.022, 0.016, 1.00, "box"));
  c.add(obj("box_h", G::Box, 0.030, 0.020, 1.50, "box"));
  c.add(obj("box_t", G::Box, 0.018, 0.028, 1.10, "box"));
  c.add(obj("caps_s", G::Capsule, 0.020, 0.015, 1.00, "capsule"));
  c.add(obj("disk_n1", G::Disk, 0.026, 0.026, 1.65, "disk"));
  c.add(obj("box_n1", G::Box, 0.026, 0.020, 1.35, "box"));
  c.add(obj("caps_n1", G::Capsule, 0.024, 0.013, 1.30, "capsule"));
  // Pour family: manipulated cups plus the static bowl.
  c.add(obj("cup_s", G::Box, 0.020, 0.030, 0.50, "cup"));
  c.add(obj("cup_t", G::Box, 0.018, 0.028, 0.55, "cup"));
  c.add(obj("cup_m", G::Box, 0.024, 0.032, 0.50, "cup"));
  c.add(obj("cup_h", G::Box, 0.021, 0.031, 0.90, "cup"));
  c.add(obj("cup_n1", G::Box, 0.023, 0.029, 0.75, "cup"));
  c.add(obj("bowl", G::Box, 0.050, 0.015, 1.00, "bowl"));
  // Lift family: crates heavy enough to exceed the one-hand payload.
  c.add(obj("crate_s", G::Box, 0.045, 0.030, 1.15, "crate"));
  c.add(obj("crate_t", G::Box, 0.042, 0.028, 1.20, "crate"));
  c.add(obj("crate_m", G::Box, 0.048, 0.032, 1.10, "crate"));
  c.add(obj("crate_h", G::Box, 0.045, 0.030, 1.25, "crate"));
  c.add(obj("crate_n1", G::Box, 0.044, 0.031, 1.18, "crate"));
  // Handover family: light rods and disks for the mid-air exchange.
  c.add(obj("rod_s", G::Capsule, 0.025, 0.012, 0.60, "rod"));
  c.add(obj("rod_t", G::Capsule, 0.022, 0.011, 0.70, "rod"));
  c.add(obj("rod_m", G::Capsule, 0.028, 0.013, 0.55, "rod"));
  c.add(obj("disk_ho", G::Disk, 0.020, 0.020, 0.65, "disk"));
  c.add(obj("rod_n1", G::Capsule, 0.026, 0.012, 0.72, "rod"));
  return c;
}

ObjectCatalog ObjectCatalog::load(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  check_keys(j, {"version", "objects"}, "object catalog");
  check_version(j, 1, "object catalog");
  ObjectCatalog c;
  for (const auto& e : j.at("objects")) {
    check_keys(e, {"id", "geometry", "dim_a", "dim_b", "density_scale", "category"}, "object entry");
    ObjectSpec o;
    o.id = e.at("id").get<std::string>();
    o.geometry = geometry_from_name(e.at("geometry").get<std::string>());
    o.dim_a = e.at("dim_a").get<double>();
    o.dim_b = e.at("dim_b").get<double>();
    o.density_scale = e.at("density_scale").get<double>();
    o.category = e.value("category", "");
    o.validate();
    c.add(std::move(o));
  }
  return c;
}

void ObjectCatalog::save(const std::filesystem::path& path) const {
  Json j;
  j["version"] = 1;
  j["objects"] = Json::array();
  for (const auto& o : items_) {
    j["objects"].push_back({{"id", o.id},
                            {"geometry", geometry_name(o.geometry)},
                            {"dim_a", o.dim_a},
                            {"dim_b", o.dim_b},
                            {"density_scale", o.density_scale},
                            {"category", o.category}});
  }
  write_json_file(path, j);
}

const ObjectSpec& ObjectCatalog::find(const std::string& id) const {
  for (const auto& o : items_) {
    if (o.id == id) return o;
  }
  throw ConfigError("object id '" + id + "' is not in the catalog");
}

bool ObjectCatalog::contains(const std::string& id) const {
  for (const auto& o : items_) {
    if (o.id == id) return true;
  }
  return false;
}

}  // namespace flywheel::env
