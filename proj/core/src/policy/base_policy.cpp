#include "flywheel/policy/base_policy.hpp"

#include <algorithm>
#include <cmath>

#include "flywheel/util/errors.hpp"

namespace flywheel::policy {

namespace {
constexpr double kPi = 3.14159265358979323846;

math::Checkpoint mlp_to_checkpoint(const math::Mlp& net, const std::string& prefix) {
  math::Checkpoint ck;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    ck.tensors[prefix + ".l" + std::to_string(l) + ".w"] = net.layers[l].w;
    ck.tensors[prefix + ".l" + std::to_string(l) + ".b"] = net.layers[l].b;
  }
  return ck;
}

math::Mlp mlp_from_checkpoint(const math::Checkpoint& ck, const std::string& prefix, math::Act act) {
  math::Mlp net;
  net.act = act;
  for (size_t l = 0;; ++l) {
    const std::string wk = prefix + ".l" + std::to_string(l) + ".w";
    const std::string bk = prefix + ".l" + std::to_string(l) + ".b";
    if (!ck.tensors.count(wk)) break;
    net.layers.push_back({ck.tensors.at(wk), ck.tensors.at(bk)});
  }
  if (net.layers.empty()) throw ConfigError("checkpoint has no '" + prefix + "' layers");
  return net;
}

}  // namespace

DiffusionSchedule DiffusionSchedule::make() {
  DiffusionSchedule s;
  s.alpha_bar.resize(kTrainTimesteps);
  const double offset = 0.008;
  auto f = [&](double t) {
    const double v = std::cos(((t / kTrainTimesteps + offset) / (1.0 + offset)) * kPi / 2.0);
    return v * v;
  };
  const double f0 = f(0.0);
  double prev = 1.0;
  for (int t = 0; t < kTrainTimesteps; ++t) {
    double ab = f(t + 1.0) / f0;
    // Clip per-step beta at 0.999 to keep the tail well-conditioned.
    ab = std::max(ab, prev * (1.0 - 0.999));
    s.alpha_bar[static_cast<size_t>(t)] = ab;
    prev = ab;
  }
  return s;
}

std::vector<double> DiffusionSchedule::time_embedding(int t) {
  std::vector<double> emb;
  emb.reserve(kTimeEmbedDim);
  const double tn = static_cast<double>(t) / kTrainTimesteps;
  for (int k = 0; k < kTimeEmbedDim / 2; ++k) {
    const double w = kPi * std::pow(2.0, k);
    emb.push_back(std::sin(w * tn));
    emb.push_back(std::cos(w * tn));
  }
  return emb;
}

std::vector<int> DiffusionSchedule::inference_timesteps() const {
  std::vector<int> ts;
  for (int k = 0; k < kInferenceSteps; ++k) {
    const double frac = 1.0 - static_cast<double>(k) / (kInferenceSteps - 1);
    ts.push_back(static_cast<int>(std::lround((kTrainTimesteps - 1) * frac)));
  }
  return ts;
}

const char* variant_name(BasePolicy::Variant v) {
  return v == BasePolicy::Variant::BcMlp ? "bc-mlp" : "diffusion-mlp";
}

BasePolicy::Variant variant_from_name(const std::string& name) {
  if (name == "bc-mlp") return BasePolicy::Variant::BcMlp;
  if (name == "diffusion-mlp") return BasePolicy::Variant::DiffusionMlp;
  throw ConfigError("unknown base policy variant '" + name + "'");
}

BasePolicy BasePolicy::make_bc(int obs_dim, int action_dim, const std::vector<int>& hidden,
                               math::Rng& rng) {
  BasePolicy p;
  p.variant = Variant::BcMlp;
  p.obs_dim = obs_dim;
  p.action_dim = action_dim;
  std::vector<int> dims = {obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(p.horizon * action_dim);
  p.net = math::Mlp::init(dims, math::Act::Tanh, rng);
  return p;
}

BasePolicy BasePolicy::make_diffusion(int obs_dim, int action_dim, const std::vector<int>& hidden,
                                      math::Rng& rng) {
  BasePolicy p;
  p.variant = Variant::DiffusionMlp;
  p.obs_dim = obs_dim;
  p.action_dim = action_dim;
  p.schedule = DiffusionSchedule::make();
  const int chunk = p.horizon * action_dim;
  std::vector<int> dims = {obs_dim + chunk + DiffusionSchedule::kTimeEmbedDim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(chunk);
  // Zero output head: the untrained denoiser predicts zero noise.
  p.net = math::Mlp::init(dims, math::Act::Tanh, rng, 0.0);
  return p;
}

std::vector<double> BasePolicy::denoiser_input(std::span<const double> obs, std::span<const double> noisy,
                                               int t) const {
  std::vector<double> in;
  in.reserve(obs.size() + noisy.size() + DiffusionSchedule::kTimeEmbedDim);
  in.insert(in.end(), obs.begin(), obs.end());
  in.insert(in.end(), noisy.begin(), noisy.end());
  const auto emb = DiffusionSchedule::time_embedding(t);
  in.insert(in.end(), emb.begin(), emb.end());
  return in;
}

std::vector<double> BasePolicy::infer(std::span<const double> obs, uint64_t seed) const {
  if (static_cast<int>(obs.size()) != obs_dim) {
    throw ConfigError("base policy got " + std::to_string(obs.size()) + " obs dims, expected " +
                      std::to_string(obs_dim));
  }
  const int chunk = horizon * action_dim;

  if (variant == Variant::BcMlp) {
    math::Tensor x({1, obs_dim}, std::vector<double>(obs.begin(), obs.end()));
    const math::Tensor out = net.apply(x);
    std::vector<double> a(out.values().begin(), out.values().end());
    for (auto& v : a) v = std::clamp(v, -1.0, 1.0);
    return a;
  }

  // DDIM reverse process from seed-deterministic noise, eta = 0.
  math::Rng rng(math::derive_seed(seed, {0xdd1ull}));
  std::vector<double> x(static_cast<size_t>(chunk));
  for (auto& v : x) v = rng.normal();

  const auto ts = schedule.inference_timesteps();
  for (size_t k = 0; k < ts.size(); ++k) {
    const int t = ts[k];
    const double ab_t = schedule.alpha_bar[static_cast<size_t>(t)];
    const double ab_prev = k + 1 < ts.size() ? schedule.alpha_bar[static_cast<size_t>(ts[k + 1])] : 1.0;

    const auto in = denoiser_input(obs, x, t);
    math::Tensor xt({1, static_cast<int>(in.size())}, in);
    const math::Tensor eps = net.apply(xt);

    for (int i = 0; i < chunk; ++i) {
      double x0 = (x[static_cast<size_t>(i)] - std::sqrt(1.0 - ab_t) * eps[i]) / std::sqrt(ab_t);
      x0 = std::clamp(x0, -1.0, 1.0);
      x[static_cast<size_t>(i)] = std::sqrt(ab_prev) * x0 + std::sqrt(1.0 - ab_prev) * eps[i];
    }
  }
  for (auto& v : x) v = std::clamp(v, -1.0, 1.0);
  return x;
}

math::Checkpoint BasePolicy::to_checkpoint() const {
  math::Checkpoint ck = mlp_to_checkpoint(net, "net");
  ck.meta["kind"] = "base-policy";
  ck.meta["variant"] = variant_name(variant);
  ck.meta["obs_dim"] = std::to_string(obs_dim);
  ck.meta["action_dim"] = std::to_string(action_dim);
  ck.meta["horizon"] = std::to_string(horizon);
  ck.meta["obs_layout"] = "1";
  return ck;
}

BasePolicy BasePolicy::from_checkpoint(const math::Checkpoint& ck) {
  BasePolicy p;
  p.variant = variant_from_name(ck.meta.at("variant"));
  p.obs_dim = std::stoi(ck.meta.at("obs_dim"));
  p.action_dim = std::stoi(ck.meta.at("action_dim"));
  p.horizon = std::stoi(ck.meta.at("horizon"));
  p.net = mlp_from_checkpoint(ck, "net", math::Act::Tanh);
  if (p.variant == Variant::DiffusionMlp) p.schedule = DiffusionSchedule::make();
  return p;
}

}  // namespace flywheel::policy
