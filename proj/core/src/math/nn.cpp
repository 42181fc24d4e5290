#include "flywheel/math/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace flywheel::math {

Mlp Mlp::init(const std::vector<int>& dims, Act act, Rng& rng, double last_layer_scale) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp::init: need at least in/out dims");
  Mlp net;
  net.act = act;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Linear lin;
    lin.w = Tensor({dims[l], dims[l + 1]});
    lin.b = Tensor({1, dims[l + 1]});
    const double s = std::sqrt(1.0 / dims[l]) * (l + 2 == dims.size() ? last_layer_scale : 1.0);
    for (auto& v : lin.w.values()) v = rng.uniform(-s, s);
    net.layers.push_back(std::move(lin));
  }
  return net;
}

Tensor Mlp::apply(const Tensor& x) const {
  Tensor h = x;
  for (size_t l = 0; l < layers.size(); ++l) {
    h = add_rowvec(matmul(h, layers[l].w), layers[l].b);
    if (l + 1 < layers.size()) {
      for (auto& v : h.values()) v = act == Act::Tanh ? std::tanh(v) : std::max(0.0, v);
    }
  }
  return h;
}

Mlp::Staged Mlp::stage(Tape& t) const {
  Staged s;
  for (const auto& lin : layers) {
    s.w.push_back(t.leaf(lin.w));
    s.b.push_back(t.leaf(lin.b));
  }
  return s;
}

Var Mlp::forward(Tape& t, const Staged& s, Var x) const {
  Var h = x;
  for (size_t l = 0; l < layers.size(); ++l) {
    h = t.add_rowvec(t.matmul(h, s.w[l]), s.b[l]);
    if (l + 1 < layers.size()) h = act == Act::Tanh ? t.tanh(h) : t.relu(h);
  }
  return h;
}

std::vector<Tensor*> Mlp::params() {
  std::vector<Tensor*> ps;
  for (auto& lin : layers) {
    ps.push_back(&lin.w);
    ps.push_back(&lin.b);
  }
  return ps;
}

std::vector<const Tensor*> Mlp::params() const {
  std::vector<const Tensor*> ps;
  for (const auto& lin : layers) {
    ps.push_back(&lin.w);
    ps.push_back(&lin.b);
  }
  return ps;
}

std::vector<Tensor> staged_grads(const Tape& t, const Mlp::Staged& s) {
  std::vector<Tensor> gs;
  for (size_t l = 0; l < s.w.size(); ++l) {
    gs.push_back(t.grad(s.w[l]));
    gs.push_back(t.grad(s.b[l]));
  }
  return gs;
}

}  // namespace flywheel::math
