#pragma once

#include <cstdint>
#include <vector>

#include "flywheel/math/tensor.hpp"

namespace flywheel::math {

/// Adam with bias correction followed by decoupled weight decay.
/// Betas/epsilon are fixed at the usual (0.9, 0.999, 1e-8).
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamConfig cfg);

  /// One update; `grads` must match params() order and shapes. The step
  /// counter advances by exactly one per call.
  void step(const std::vector<Tensor>& grads);

  void set_lr(double lr) { cfg_.lr = lr; }
  double lr() const { return cfg_.lr; }
  int64_t steps() const { return t_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<Tensor> m_, v_;
  AdamConfig cfg_;
  int64_t t_ = 0;
};

double global_norm(const std::vector<Tensor>& grads);

/// Scales all gradients by max_norm/norm when the global L2 norm exceeds
/// max_norm; identity otherwise. Returns the factor applied.
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

}  // namespace flywheel::math
