#include <cmath>

#include "flywheel/env/types.hpp"
#include "flywheel/util/errors.hpp"

namespace flywheel::env {

const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::Grasp: return "grasp";
    case TaskKind::Pour: return "pour";
    case TaskKind::Lift: return "lift";
    case TaskKind::Handover: return "handover";
  }
  return "?";
}

TaskKind task_from_name(const std::string& name) {
  if (name == "grasp") return TaskKind::Grasp;
  if (name == "pour") return TaskKind::Pour;
  if (name == "lift") return TaskKind::Lift;
  if (name == "handover") return TaskKind::Handover;
  throw ConfigError("unknown task '" + name + "' (expected grasp|pour|lift|handover)");
}

double ObjectSpec::grip_radius() const {
  switch (geometry) {
    case Geometry::Disk: return dim_a;
    case Geometry::Box: return dim_a;
    case Geometry::Capsule: return dim_b;
  }
  return dim_a;
}

double ObjectSpec::area() const {
  constexpr double pi = 3.14159265358979323846;
  switch (geometry) {
    case Geometry::Disk: return pi * dim_a * dim_a;
    case Geometry::Box: return 4.0 * dim_a * dim_b;
    case Geometry::Capsule: return 4.0 * dim_a * dim_b + pi * dim_b * dim_b;
  }
  return 0.0;
}

double ObjectSpec::mass() const {
  constexpr double pi = 3.14159265358979323846;
  const double reference = pi * 0.025 * 0.025;
  return density_scale * area() / reference;
}

void ObjectSpec::validate() const {
  if (dim_a <= 0.0 || dim_b <= 0.0) {
    throw ConfigError("object '" + id + "': dimensions must be positive");
  }
  if (density_scale < 0.1 || density_scale > 50.0) {
    throw ConfigError("object '" + id + "': density-scale " + std::to_string(density_scale) +
                      " outside [0.1, 50]");
  }
}

}  // namespace flywheel::env
