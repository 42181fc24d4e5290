#include "flywheel/math/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace flywheel::math {

Adam::Adam(std::vector<Tensor*> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  if (cfg_.lr <= 0.0) throw std::invalid_argument("Adam: learning rate must be > 0");
  if (cfg_.weight_decay < 0.0) throw std::invalid_argument("Adam: weight decay must be >= 0");
  for (auto* p : params_) {
    m_.push_back(Tensor::zeros_like(*p));
    v_.push_back(Tensor::zeros_like(*p));
  }
}

void Adam::step(const std::vector<Tensor>& grads) {
  if (grads.size() != params_.size()) throw std::invalid_argument("Adam::step: gradient count mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = *params_[k];
    const Tensor& g = grads[k];
    if (!p.same_shape(g)) throw std::invalid_argument("Adam::step: gradient shape mismatch");
    for (int64_t i = 0; i < p.size(); ++i) {
      m_[k][i] = cfg_.beta1 * m_[k][i] + (1.0 - cfg_.beta1) * g[i];
      v_[k][i] = cfg_.beta2 * v_[k][i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double mhat = m_[k][i] / bc1;
      const double vhat = v_[k][i] / bc2;
      p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      p[i] -= cfg_.lr * cfg_.weight_decay * p[i];
    }
    p.check_finite("Adam::step");
  }
}

double global_norm(const std::vector<Tensor>& grads) {
  double ss = 0.0;
  for (const auto& g : grads) {
    for (double x : g.values()) ss += x * x;
  }
  return std::sqrt(ss);
}

double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  if (max_norm <= 0.0) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
  const double norm = global_norm(grads);
  if (norm <= max_norm) return 1.0;
  const double factor = max_norm / norm;
  for (auto& g : grads) {
    for (auto& x : g.values()) x *= factor;
  }
  return factor;
}

}  // namespace flywheel::math
