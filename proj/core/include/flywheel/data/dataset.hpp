#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flywheel/env/types.hpp"

namespace flywheel::data {

inline constexpr int kChunkHorizon = 8;  // actions emitted per policy inference

enum class Source { ScriptedSeed, Rollout, Augmented };
const char* source_name(Source s);
Source source_from_name(const std::string& name);

/// One policy-inference step: the observation at the chunk start and the
/// H x action-dim block of executed actions (the final chunk of an episode
/// may be shorter; the owning trajectory is then marked partial_final_chunk).
/// Per-step base actions and residual corrections are kept when the
/// trajectory came from a combined-policy rollout.
struct Transition {
  std::vector<double> observation;
  int steps = 0;       // rows in `actions`
  int action_dim = 0;  // columns
  std::vector<double> actions;               // steps x action_dim, row-major
  std::vector<double> base_actions;          // optional, same layout
  std::vector<double> residual_corrections;  // optional, applied corrections (alpha-scaled)
  double reward = 0.0;                       // summed over the chunk's steps

  bool operator==(const Transition&) const = default;
};

struct Trajectory {
  std::string id;
  env::ScenarioConfig config;
  uint64_t env_seed = 0;  // reset seed; needed to replay exactly
  std::vector<Transition> transitions;
  bool success = false;
  Source source = Source::ScriptedSeed;
  std::vector<std::string> lineage;  // parent ids, nearest first
  int iteration_born = 0;
  bool partial_final_chunk = false;

  int total_steps() const;
  /// Flat per-step action sequence (row per env step).
  std::vector<std::vector<double>> action_sequence() const;
};

/// Table-style diversity accounting: configs is always the O*E*P product.
struct DiversityLedger {
  int objects = 0;
  int environments = 0;
  int poses = 0;
  int64_t configs = 0;
  int64_t trajectories = 0;

  bool operator==(const DiversityLedger&) const = default;
};

/// Spatial poses are bucketed on a 1 cm / 5 degree grid for P counting.
struct PoseBucket {
  int64_t x = 0, z = 0, theta = 0;
  auto operator<=>(const PoseBucket&) const = default;
};
PoseBucket pose_bucket(const env::Pose2& pose);

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string id, env::TaskKind task) : id_(std::move(id)), task_(task) {}

  const std::string& id() const { return id_; }
  env::TaskKind task() const { return task_; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const DiversityLedger& ledger() const { return ledger_; }
  bool empty() const { return trajectories_.empty(); }
  int64_t size() const { return static_cast<int64_t>(trajectories_.size()); }

  void add(Trajectory t);
  void set_id(std::string id) { id_ = std::move(id); }

  /// Checks lineage acyclicity and that augmented entries carry parents.
  void validate_lineage() const;

 private:
  std::string id_;
  env::TaskKind task_ = env::TaskKind::Grasp;
  std::vector<Trajectory> trajectories_;
  DiversityLedger ledger_;
};

/// Recomputes O, E, P, configs and trajectory count from the stored configs.
DiversityLedger diversity_stats(const Dataset& d);

/// Uniform sample of n trajectories without replacement, seed-deterministic;
/// the ledger is recomputed. Rejects n > size.
Dataset downsample(const Dataset& d, int64_t n, uint64_t seed);

}  // namespace flywheel::data
