#include "flywheel/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "flywheel/math/rng.hpp"
#include "flywheel/util/errors.hpp"

namespace flywheel::data {

const char* source_name(Source s) {
  switch (s) {
    case Source::ScriptedSeed: return "scripted-seed";
    case Source::Rollout: return "rollout";
    case Source::Augmented: return "augmented";
  }
  return "?";
}

Source source_from_name(const std::string& name) {
  if (name == "scripted-seed") return Source::ScriptedSeed;
  if (name == "rollout") return Source::Rollout;
  if (name == "augmented") return Source::Augmented;
  throw ConfigError("unknown trajectory source '" + name + "'");
}

int Trajectory::total_steps() const {
  int n = 0;
  for (const auto& t : transitions) n += t.steps;
  return n;
}

std::vector<std::vector<double>> Trajectory::action_sequence() const {
  std::vector<std::vector<double>> seq;
  for (const auto& t : transitions) {
    for (int r = 0; r < t.steps; ++r) {
      seq.emplace_back(t.actions.begin() + static_cast<int64_t>(r) * t.action_dim,
                       t.actions.begin() + static_cast<int64_t>(r + 1) * t.action_dim);
    }
  }
  return seq;
}

PoseBucket pose_bucket(const env::Pose2& pose) {
  constexpr double kPosGrid = 0.01;                       // 1 cm
  constexpr double kAngGrid = 5.0 * 3.14159265358979323846 / 180.0;  // 5 degrees
  return PoseBucket{std::llround(pose.x / kPosGrid), std::llround(pose.z / kPosGrid),
                    std::llround(pose.theta / kAngGrid)};
}

void Dataset::add(Trajectory t) {
  trajectories_.push_back(std::move(t));
  ledger_ = diversity_stats(*this);
}

void Dataset::validate_lineage() const {
  for (const auto& t : trajectories_) {
    if (t.source == Source::Augmented && t.lineage.empty()) {
      throw StageError("dataset", "augmented trajectory '" + t.id + "' has no lineage");
    }
    for (const auto& parent : t.lineage) {
      if (parent == t.id) {
        throw StageError("dataset", "trajectory '" + t.id + "' appears in its own lineage");
      }
    }
  }
}

DiversityLedger diversity_stats(const Dataset& d) {
  std::set<std::string> objects, environments;
  std::set<PoseBucket> poses;
  for (const auto& t : d.trajectories()) {
    objects.insert(t.config.object.id);
    environments.insert(t.config.environment_id);
    poses.insert(pose_bucket(t.config.spatial_pose));
  }
  DiversityLedger l;
  l.objects = static_cast<int>(objects.size());
  l.environments = static_cast<int>(environments.size());
  l.poses = static_cast<int>(poses.size());
  l.configs = static_cast<int64_t>(l.objects) * l.environments * l.poses;
  l.trajectories = d.size();
  return l;
}

Dataset downsample(const Dataset& d, int64_t n, uint64_t seed) {
  if (n > d.size()) {
    throw ConfigError("downsample: requested " + std::to_string(n) + " of " + std::to_string(d.size()) +
                      " trajectories");
  }
  std::vector<int64_t> idx(static_cast<size_t>(d.size()));
  for (int64_t i = 0; i < d.size(); ++i) idx[static_cast<size_t>(i)] = i;
  math::Rng rng(math::derive_seed(seed, {0xd005ull}));
  // Partial Fisher-Yates: the first n slots become the sample.
  for (int64_t i = 0; i < n; ++i) {
    const int64_t j = i + rng.uniform_int(d.size() - i);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(n));
  std::sort(idx.begin(), idx.end());

  Dataset out(d.id(), d.task());
  for (int64_t i : idx) out.add(d.trajectories()[static_cast<size_t>(i)]);
  return out;
}

}  // namespace flywheel::data
