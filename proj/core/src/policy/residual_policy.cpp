#include "flywheel/policy/residual_policy.hpp"

#include <algorithm>
#include <cmath>

#include "flywheel/util/errors.hpp"

namespace flywheel::policy {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5*log(2*pi)
constexpr double kLn2 = 0.69314718055994530942;

double softplus_stable(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }
}  // namespace

ResidualPolicy ResidualPolicy::make(int obs_dim, int action_dim, const std::vector<int>& hidden,
                                    math::Rng& rng) {
  if (hidden.empty()) throw ConfigError("residual policy needs at least one hidden layer");
  ResidualPolicy p;
  p.obs_dim = obs_dim;
  p.action_dim = action_dim;
  std::vector<int> dims = {obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  p.trunk = math::Mlp::init(dims, math::Act::Tanh, rng);
  // Zero-initialized heads: mean-mode corrections start at exactly zero.
  p.mean_head.w = math::Tensor({hidden.back(), action_dim});
  p.mean_head.b = math::Tensor({1, action_dim});
  p.log_std_head.w = math::Tensor({hidden.back(), action_dim});
  p.log_std_head.b = math::Tensor({1, action_dim});
  return p;
}

ResidualPolicy::Gaussian ResidualPolicy::gaussian(std::span<const double> obs) const {
  if (static_cast<int>(obs.size()) != obs_dim) {
    throw ConfigError("residual policy got " + std::to_string(obs.size()) + " obs dims, expected " +
                      std::to_string(obs_dim));
  }
  math::Tensor x({1, obs_dim}, std::vector<double>(obs.begin(), obs.end()));
  math::Tensor h = trunk.apply(x);
  for (auto& v : h.values()) v = std::tanh(v);
  const math::Tensor mean = add_rowvec(matmul(h, mean_head.w), mean_head.b);
  math::Tensor logstd = add_rowvec(matmul(h, log_std_head.w), log_std_head.b);
  Gaussian g;
  g.mean.assign(mean.values().begin(), mean.values().end());
  for (int64_t i = 0; i < logstd.size(); ++i) {
    g.log_std.push_back(std::clamp(logstd[i], kLogStdMin, kLogStdMax));
  }
  return g;
}

std::vector<double> ResidualPolicy::infer_mean(std::span<const double> obs) const {
  Gaussian g = gaussian(obs);
  std::vector<double> a(g.mean.size());
  for (size_t i = 0; i < a.size(); ++i) a[i] = std::tanh(g.mean[i]);
  return a;
}

std::vector<double> ResidualPolicy::infer_sample(std::span<const double> obs, math::Rng& rng) const {
  Gaussian g = gaussian(obs);
  std::vector<double> a(g.mean.size());
  for (size_t i = 0; i < a.size(); ++i) {
    const double u = g.mean[i] + std::exp(g.log_std[i]) * rng.normal();
    a[i] = std::tanh(u);
  }
  return a;
}

double ResidualPolicy::log_prob(const Gaussian& g, std::span<const double> xi) {
  double lp = 0.0;
  for (size_t i = 0; i < xi.size(); ++i) {
    const double u = g.mean[i] + std::exp(g.log_std[i]) * xi[i];
    lp += -0.5 * xi[i] * xi[i] - g.log_std[i] - kHalfLog2Pi;
    lp -= 2.0 * (kLn2 - u - softplus_stable(-2.0 * u));  // log(1 - tanh(u)^2)
  }
  return lp;
}

std::vector<math::Tensor*> ResidualPolicy::params() {
  auto ps = trunk.params();
  ps.push_back(&mean_head.w);
  ps.push_back(&mean_head.b);
  ps.push_back(&log_std_head.w);
  ps.push_back(&log_std_head.b);
  return ps;
}

std::vector<const math::Tensor*> ResidualPolicy::params() const {
  std::vector<const math::Tensor*> ps;
  for (const auto* p : const_cast<ResidualPolicy*>(this)->trunk.params()) ps.push_back(p);
  ps.push_back(&mean_head.w);
  ps.push_back(&mean_head.b);
  ps.push_back(&log_std_head.w);
  ps.push_back(&log_std_head.b);
  return ps;
}

math::Checkpoint ResidualPolicy::to_checkpoint() const {
  math::Checkpoint ck;
  for (size_t l = 0; l < trunk.layers.size(); ++l) {
    ck.tensors["trunk.l" + std::to_string(l) + ".w"] = trunk.layers[l].w;
    ck.tensors["trunk.l" + std::to_string(l) + ".b"] = trunk.layers[l].b;
  }
  ck.tensors["mean.w"] = mean_head.w;
  ck.tensors["mean.b"] = mean_head.b;
  ck.tensors["logstd.w"] = log_std_head.w;
  ck.tensors["logstd.b"] = log_std_head.b;
  ck.meta["kind"] = "residual-policy";
  ck.meta["obs_dim"] = std::to_string(obs_dim);
  ck.meta["action_dim"] = std::to_string(action_dim);
  ck.meta["obs_layout"] = "1";
  return ck;
}

ResidualPolicy ResidualPolicy::from_checkpoint(const math::Checkpoint& ck) {
  ResidualPolicy p;
  p.obs_dim = std::stoi(ck.meta.at("obs_dim"));
  p.action_dim = std::stoi(ck.meta.at("action_dim"));
  p.trunk.act = math::Act::Tanh;
  for (size_t l = 0;; ++l) {
    const std::string wk = "trunk.l" + std::to_string(l) + ".w";
    if (!ck.tensors.count(wk)) break;
    p.trunk.layers.push_back(
        {ck.tensors.at(wk), ck.tensors.at("trunk.l" + std::to_string(l) + ".b")});
  }
  p.mean_head = {ck.tensors.at("mean.w"), ck.tensors.at("mean.b")};
  p.log_std_head = {ck.tensors.at("logstd.w"), ck.tensors.at("logstd.b")};
  return p;
}

ResidualStaged stage_residual(math::Tape& t, const ResidualPolicy& p) {
  ResidualStaged s;
  s.trunk = p.trunk.stage(t);
  s.wm = t.leaf(p.mean_head.w);
  s.bm = t.leaf(p.mean_head.b);
  s.ws = t.leaf(p.log_std_head.w);
  s.bs = t.leaf(p.log_std_head.b);
  return s;
}

ActorTapeOut residual_forward_tape(math::Tape& t, const ResidualPolicy& p, const ResidualStaged& s,
                                   math::Var obs, const math::Tensor& xi) {
  using math::Var;
  Var h = t.tanh(p.trunk.forward(t, s.trunk, obs));
  Var mean = t.add_rowvec(t.matmul(h, s.wm), s.bm);
  Var log_std = t.clamp(t.add_rowvec(t.matmul(h, s.ws), s.bs), kLogStdMin, kLogStdMax);
  Var xiv = t.leaf(xi);
  Var u = t.add(mean, t.mul(t.exp(log_std), xiv));

  ActorTapeOut out;
  out.squashed = t.tanh(u);

  // log N(u; mean, std) - log(1 - tanh(u)^2), summed over action dims.
  Var gauss = t.sub(t.add_const(t.scale(t.mul(xiv, xiv), -0.5), -kHalfLog2Pi), log_std);
  Var inner = t.add(u, t.softplus(t.scale(u, -2.0)));
  Var corr = t.add_const(t.scale(inner, -2.0), 2.0 * kLn2);
  out.log_prob = t.sum_rows(t.sub(gauss, corr));
  return out;
}

std::vector<math::Tensor> residual_staged_grads(const math::Tape& t, const ResidualStaged& s) {
  std::vector<math::Tensor> gs = math::staged_grads(t, s.trunk);
  gs.push_back(t.grad(s.wm));
  gs.push_back(t.grad(s.bm));
  gs.push_back(t.grad(s.ws));
  gs.push_back(t.grad(s.bs));
  return gs;
}

}  // namespace flywheel::policy
