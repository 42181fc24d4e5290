#include "flywheel/policy/combined.hpp"

#include <algorithm>

#include "flywheel/util/errors.hpp"

namespace flywheel::policy {

double epsilon(const MixingSchedule& schedule, int64_t global_step) {
  if (global_step <= schedule.start_step) return 0.0;
  if (global_step >= schedule.end_step) return 1.0;
  return static_cast<double>(global_step - schedule.start_step) /
         static_cast<double>(schedule.end_step - schedule.start_step);
}

std::vector<double> combine_raw(std::span<const double> a, std::span<const double> da, double alpha) {
  if (a.size() != da.size()) throw ConfigError("combine: action/correction size mismatch");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + alpha * da[i];
  return out;
}

std::vector<double> combine(std::span<const double> a, std::span<const double> da, double alpha) {
  auto out = combine_raw(a, da, alpha);
  for (auto& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

TrainingAction act_training(const CombinedPolicy& p, std::span<const double> base_action,
                            std::span<const double> obs, int64_t global_step, math::Rng& rng) {
  TrainingAction out;
  const double eps = epsilon(p.schedule, global_step);
  const bool use = rng.uniform() < eps;
  if (use) {
    out.residual = p.residual.infer_sample(obs, rng);
    out.action = combine(base_action, out.residual, p.alpha);
    out.used_residual = true;
  } else {
    // Keep the rng stream aligned: the sample is drawn either way.
    (void)p.residual;
    out.residual.assign(base_action.size(), 0.0);
    out.action.assign(base_action.begin(), base_action.end());
    out.used_residual = false;
  }
  return out;
}

math::Checkpoint CombinedPolicy::to_checkpoint() const {
  math::Checkpoint ck;
  const math::Checkpoint b = base.to_checkpoint();
  for (const auto& [k, v] : b.tensors) ck.tensors["base." + k] = v;
  for (const auto& [k, v] : b.meta) ck.meta["base." + k] = v;
  const math::Checkpoint r = residual.to_checkpoint();
  for (const auto& [k, v] : r.tensors) ck.tensors["residual." + k] = v;
  for (const auto& [k, v] : r.meta) ck.meta["residual." + k] = v;
  ck.meta["kind"] = "combined-policy";
  ck.meta["alpha"] = std::to_string(alpha);
  ck.meta["mixing_start"] = std::to_string(schedule.start_step);
  ck.meta["mixing_end"] = std::to_string(schedule.end_step);
  ck.meta["obs_layout"] = "1";
  return ck;
}

CombinedPolicy CombinedPolicy::from_checkpoint(const math::Checkpoint& ck) {
  auto strip = [&](const std::string& prefix) {
    math::Checkpoint sub;
    for (const auto& [k, v] : ck.tensors) {
      if (k.rfind(prefix, 0) == 0) sub.tensors[k.substr(prefix.size())] = v;
    }
    for (const auto& [k, v] : ck.meta) {
      if (k.rfind(prefix, 0) == 0) sub.meta[k.substr(prefix.size())] = v;
    }
    return sub;
  };
  CombinedPolicy p;
  p.base = BasePolicy::from_checkpoint(strip("base."));
  p.residual = ResidualPolicy::from_checkpoint(strip("residual."));
  p.alpha = std::stod(ck.meta.at("alpha"));
  p.schedule.start_step = std::stoll(ck.meta.at("mixing_start"));
  p.schedule.end_step = std::stoll(ck.meta.at("mixing_end"));
  return p;
}

void CombinedPolicy::save(const std::filesystem::path& path) const {
  math::save_checkpoint(to_checkpoint(), path);
}

CombinedPolicy CombinedPolicy::load(const std::filesystem::path& path) {
  return from_checkpoint(math::load_checkpoint(path));
}

}  // namespace flywheel::policy
