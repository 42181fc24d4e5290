#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flywheel/policy/base_policy.hpp"
#include "flywheel/policy/residual_policy.hpp"

namespace flywheel::policy {

/// Progressive exploration schedule: epsilon is 0 up to start_step, 1 from
/// end_step, linear in between.
struct MixingSchedule {
  int64_t start_step = 1500;
  int64_t end_step = 10000;
};

double epsilon(const MixingSchedule& schedule, int64_t global_step);

/// a + alpha * da, componentwise.
std::vector<double> combine_raw(std::span<const double> a, std::span<const double> da, double alpha);
/// a + alpha * da, then clamped to the [-1, 1] action bounds.
std::vector<double> combine(std::span<const double> a, std::span<const double> da, double alpha);

/// Frozen rollout/data-generation agent: base + alpha * residual at every
/// step. The deployment path never branches on the mixing schedule; the
/// schedule only gates exploration during residual training.
struct CombinedPolicy {
  BasePolicy base;
  ResidualPolicy residual;
  double alpha = 0.1;
  MixingSchedule schedule;

  math::Checkpoint to_checkpoint() const;
  static CombinedPolicy from_checkpoint(const math::Checkpoint& ck);
  void save(const std::filesystem::path& path) const;
  static CombinedPolicy load(const std::filesystem::path& path);
};

struct TrainingAction {
  std::vector<double> action;    // executed action
  std::vector<double> residual;  // squashed correction actually applied (zeros when unused)
  bool used_residual = false;
};

/// Eq.-style progressive mixing: with probability epsilon(step) execute the
/// combined action, otherwise the base action alone.
TrainingAction act_training(const CombinedPolicy& p, std::span<const double> base_action,
                            std::span<const double> obs, int64_t global_step, math::Rng& rng);

}  // namespace flywheel::policy
