#pragma once

#include <span>
#include <vector>

#include "flywheel/env/registry.hpp"
#include "flywheel/env/types.hpp"

namespace flywheel::env {

/// Deterministic planar analogue of the four manipulation tasks.
///
/// The environment is a value-semantic state machine: the PlanarEnv object
/// itself is immutable after construction, and step() is a pure function of
/// (state, action) — identical inputs give bit-identical outputs, so
/// arbitrarily many instances may run on different threads and any recorded
/// episode replays exactly.
///
/// Contact physics is replaced by a grip model: fingers close toward a
/// commanded aperture and stop at the object surface; commanding past the
/// contact aperture produces "press"; a hand grips once press exceeds a
/// threshold while its grip center is inside the grasp radius (with
/// hysteresis on release), and the object rigidly follows the gripping
/// hand(s) whenever their combined friction-scaled payload covers its mass.
class PlanarEnv {
 public:
  PlanarEnv(TaskKind task, ScenarioConfig config, EnvParams params, uint64_t seed);

  static PlanarEnv make(TaskKind task, const ScenarioConfig& config, const EnvRegistry& registry,
                        uint64_t seed);

  /// Deterministic initial state: hands at task home poses, object resting
  /// at config.spatial_pose on the table. The seed drives only the
  /// environment-parameter jitter, never the pose.
  EnvState reset() const;

  StepResult step(const EnvState& state, const EnvAction& action) const;

  /// Normalized-action convenience wrapper: per hand [dx, dz, dtheta,
  /// aperture], each clamped to [-1, 1].
  StepResult step(const EnvState& state, std::span<const double> normalized) const;
  EnvAction action_from_normalized(std::span<const double> normalized) const;

  std::vector<double> observe(const EnvState& state) const;

  bool success(const EnvState& state) const;
  bool timeout(const EnvState& state) const;
  double reward(const EnvState& state) const;

  TaskKind task() const { return task_; }
  const ScenarioConfig& config() const { return config_; }
  const EnvParams& params() const { return params_; }
  uint64_t seed() const { return seed_; }
  int hands() const { return hand_count(task_); }
  double table_z() const { return params_.table_offset; }

  /// Grip center of a hand: the point between the fingertips.
  static Pose2 grip_center(const HandState& hand);
  /// Home wrist poses (z relative to the tabletop).
  static std::vector<Pose2> home_poses(TaskKind task);
  /// Aperture at which the fingers contact the object surface.
  double contact_aperture() const;
  /// Grip press in [0,1] for a commanded aperture (0 when not in the zone).
  double press(const HandState& hand, const Pose2& object) const;

 private:
  friend double reward_grasp(const PlanarEnv&, const EnvState&);
  friend double reward_pour(const PlanarEnv&, const EnvState&);
  friend double reward_lift(const PlanarEnv&, const EnvState&);
  friend double reward_handover(const PlanarEnv&, const EnvState&);

  void update_grips(EnvState& s) const;
  void update_object(EnvState& s, const EnvState& prev) const;
  void update_balls(EnvState& s) const;
  void update_handover_progress(EnvState& s) const;

  TaskKind task_;
  ScenarioConfig config_;
  EnvParams params_;
  uint64_t seed_;
};

// Per-task reward functions (dense shaping used by residual RL). Each is a
// total, finite function of the state.
double reward_grasp(const PlanarEnv& env, const EnvState& s);
double reward_pour(const PlanarEnv& env, const EnvState& s);
double reward_lift(const PlanarEnv& env, const EnvState& s);
double reward_handover(const PlanarEnv& env, const EnvState& s);

/// Individual shaping terms, exposed so tests can pin each one at its
/// formula's boundary values.
struct GraspRewardTerms {
  double finger_sum_dist = 0.0;  // sum of the three contact-point distances
  double finger_term = 0.0;
  double height_term = 0.0;
  double total = 0.0;
};
GraspRewardTerms grasp_reward_terms(const PlanarEnv& env, const EnvState& s);

struct PourRewardTerms {
  double grasp_dist = 0.0;
  double lift = 0.0;
  double tilt = 0.0;
  double ball_bowl = 0.0;
  bool success = false;
  double total = 0.0;
};
PourRewardTerms pour_reward_terms(const PlanarEnv& env, const EnvState& s);

struct LiftRewardTerms {
  double left_grasp = 0.0;
  double right_grasp = 0.0;
  double sync = 0.0;
  double lift_height = 0.0;
  double tilt_penalty = 0.0;
  double total = 0.0;
};
LiftRewardTerms lift_reward_terms(const PlanarEnv& env, const EnvState& s);

/// Handover shaping is staged; stages latch monotonically in EnvState so the
/// reward is non-decreasing along a successful execution:
///   stage 0: exp(-8*max(d_right-0.08, 0))              in (0, 1]
///   stage 1: 1 + exp(-4*|object - rendezvous|)         in (1, 2]
///   stage 2: 2 + exp(-8*max(d_left-0.08, 0))           in (2, 3]
///   stage 3: 3 + clamp(d_right/0.15, 0, 1)             in (3, 4]
///   stage 4: 5                                          (release held)
struct HandoverRewardTerms {
  int stage = 0;
  double in_stage = 0.0;
  double total = 0.0;
};
HandoverRewardTerms handover_reward_terms(const PlanarEnv& env, const EnvState& s);

/// Contact points used by the grasp reward: two fingertips at +-gap/2 and a
/// thumb-side point, all in the hand frame.
std::vector<Pose2> grasp_contact_points(const HandState& hand);

}  // namespace flywheel::env
