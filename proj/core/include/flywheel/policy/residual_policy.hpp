#pragma once

#include <span>
#include <vector>

#include "flywheel/math/checkpoint.hpp"
#include "flywheel/math/nn.hpp"
#include "flywheel/math/rng.hpp"
#include "flywheel/math/tape.hpp"

namespace flywheel::policy {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

/// Squashed-Gaussian correction head: a tanh trunk with zero-initialized
/// mean and log-std heads, so the untrained mean correction is exactly zero.
/// Outputs live in [-1, 1] componentwise before residual scaling.
struct ResidualPolicy {
  int obs_dim = 0;
  int action_dim = 0;
  math::Mlp trunk;  // linear output; tanh applied by the forward helpers
  math::Linear mean_head;
  math::Linear log_std_head;

  static ResidualPolicy make(int obs_dim, int action_dim, const std::vector<int>& hidden, math::Rng& rng);

  /// Pre-squash Gaussian parameters (row per observation).
  struct Gaussian {
    std::vector<double> mean;
    std::vector<double> log_std;  // clamped to [kLogStdMin, kLogStdMax]
  };
  Gaussian gaussian(std::span<const double> obs) const;

  std::vector<double> infer_mean(std::span<const double> obs) const;
  std::vector<double> infer_sample(std::span<const double> obs, math::Rng& rng) const;

  /// Log-density of a squashed sample with pre-squash value u = mean + std*xi.
  static double log_prob(const Gaussian& g, std::span<const double> xi);

  std::vector<math::Tensor*> params();
  std::vector<const math::Tensor*> params() const;

  math::Checkpoint to_checkpoint() const;
  static ResidualPolicy from_checkpoint(const math::Checkpoint& ck);
};

/// Tape staging for SAC updates.
struct ResidualStaged {
  math::Mlp::Staged trunk;
  math::Var wm, bm, ws, bs;
};
ResidualStaged stage_residual(math::Tape& t, const ResidualPolicy& p);

struct ActorTapeOut {
  math::Var squashed;  // (B, A) in [-1, 1]
  math::Var log_prob;  // (B, 1), includes the tanh correction
};
/// Reparameterized forward pass with fixed standard-normal draws `xi` (B, A).
ActorTapeOut residual_forward_tape(math::Tape& t, const ResidualPolicy& p, const ResidualStaged& s,
                                   math::Var obs, const math::Tensor& xi);

std::vector<math::Tensor> residual_staged_grads(const math::Tape& t, const ResidualStaged& s);

}  // namespace flywheel::policy
