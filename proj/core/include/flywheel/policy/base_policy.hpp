#pragma once

#include <span>
#include <vector>

#include "flywheel/data/dataset.hpp"
#include "flywheel/math/checkpoint.hpp"
#include "flywheel/math/nn.hpp"

namespace flywheel::policy {

/// Cosine noise schedule over the training timesteps; sampling runs a
/// 16-step deterministic DDIM pass (eta = 0) given the seed.
struct DiffusionSchedule {
  static constexpr int kTrainTimesteps = 50;
  static constexpr int kInferenceSteps = 16;
  static constexpr int kTimeEmbedDim = 8;

  std::vector<double> alpha_bar;

  static DiffusionSchedule make();
  static std::vector<double> time_embedding(int t);
  std::vector<int> inference_timesteps() const;
};

/// Imitation-learned action-chunk policy. The bc-mlp variant maps the
/// observation directly to an H x action-dim chunk; the diffusion-mlp
/// variant denoises a chunk conditioned on the observation.
struct BasePolicy {
  enum class Variant { BcMlp, DiffusionMlp };

  Variant variant = Variant::BcMlp;
  int obs_dim = 0;
  int action_dim = 0;
  int horizon = data::kChunkHorizon;
  math::Mlp net;
  DiffusionSchedule schedule;

  static BasePolicy make_bc(int obs_dim, int action_dim, const std::vector<int>& hidden, math::Rng& rng);
  static BasePolicy make_diffusion(int obs_dim, int action_dim, const std::vector<int>& hidden,
                                   math::Rng& rng);

  /// Action chunk (horizon x action_dim, row-major, clamped to [-1,1]).
  /// bc-mlp is deterministic in the observation; diffusion-mlp is
  /// deterministic in (observation, seed).
  std::vector<double> infer(std::span<const double> obs, uint64_t seed) const;

  /// Denoiser input vector [obs | noisy chunk | time embedding].
  std::vector<double> denoiser_input(std::span<const double> obs, std::span<const double> noisy,
                                     int t) const;

  math::Checkpoint to_checkpoint() const;
  static BasePolicy from_checkpoint(const math::Checkpoint& ck);
};

const char* variant_name(BasePolicy::Variant v);
BasePolicy::Variant variant_from_name(const std::string& name);

}  // namespace flywheel::policy
