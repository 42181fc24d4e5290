#pragma once

#include <vector>

#include "flywheel/math/rng.hpp"
#include "flywheel/math/tape.hpp"
#include "flywheel/math/tensor.hpp"

namespace flywheel::math {

enum class Act { Tanh, Relu };

struct Linear {
  Tensor w;  // (in, out)
  Tensor b;  // (1, out)
};

/// Plain fully-connected net. Hidden layers use `act`, output is linear.
struct Mlp {
  std::vector<Linear> layers;
  Act act = Act::Tanh;

  /// dims = {in, hidden..., out}. Weights ~ U(-s, s) with s = sqrt(1/fan_in);
  /// the last layer is additionally scaled by `last_layer_scale` (0 gives an
  /// exactly-zero output head).
  static Mlp init(const std::vector<int>& dims, Act act, Rng& rng, double last_layer_scale = 1.0);

  /// Inference path without a tape; thread-safe on const params.
  Tensor apply(const Tensor& x) const;

  /// Parameter handles staged on a tape for one training step.
  struct Staged {
    std::vector<Var> w, b;
  };
  Staged stage(Tape& t) const;
  Var forward(Tape& t, const Staged& s, Var x) const;

  std::vector<Tensor*> params();
  std::vector<const Tensor*> params() const;
  int in_dim() const { return layers.front().w.rows(); }
  int out_dim() const { return layers.back().w.cols(); }
};

/// Collects gradients of staged parameters in params() order.
std::vector<Tensor> staged_grads(const Tape& t, const Mlp::Staged& s);

}  // namespace flywheel::math
