#include <algorithm>
#include <cmath>

#include "flywheel/env/planar_env.hpp"

namespace flywheel::env {

namespace {

constexpr double kRadToDeg = 57.29577951308232087680;

double dist2d(double ax, double az, double bx, double bz) { return std::hypot(ax - bx, az - bz); }

double grip_dist(const HandState& hand, const Pose2& object) {
  const Pose2 gc = PlanarEnv::grip_center(hand);
  return dist2d(gc.x, gc.z, object.x, object.z);
}

}  // namespace

GraspRewardTerms grasp_reward_terms(const PlanarEnv& env, const EnvState& s) {
  GraspRewardTerms t;
  for (const Pose2& p : grasp_contact_points(s.hands[0])) {
    t.finger_sum_dist += dist2d(p.x, p.z, s.object.x, s.object.z);
  }
  t.finger_term = std::exp(-5.0 * std::max(t.finger_sum_dist - 0.05, 0.0));
  const double z_target = s.object_start_z + 0.2;
  t.height_term = 100.0 * std::max(0.2 - std::abs(z_target - s.object.z), -0.01);
  t.total = t.finger_term + t.height_term;
  (void)env;
  return t;
}

double reward_grasp(const PlanarEnv& env, const EnvState& s) { return grasp_reward_terms(env, s).total; }

PourRewardTerms pour_reward_terms(const PlanarEnv& env, const EnvState& s) {
  PourRewardTerms t;
  // Planar hand: thumb and finger share the single grip-center contact.
  const double d = grip_dist(s.hands[0], s.object);
  t.grasp_dist = 0.5 * (std::exp(-8.0 * d) + std::exp(-8.0 * d)) / 2.0;
  const double h = s.object.z - s.object_start_z;
  t.lift = 50.0 * std::max(0.08 - std::abs(h - 0.08), -0.01);
  t.tilt = 0.5 * (1.0 - std::cos(s.object.theta));
  double d_ball = 1e9;
  for (const auto& b : s.balls) d_ball = std::min(d_ball, std::abs(b.x - s.bowl_x));
  if (s.balls.empty()) d_ball = std::abs(s.object.x - s.bowl_x);
  t.ball_bowl = 10.0 * std::exp(-5.0 * std::max(d_ball - 0.02, 0.0));
  t.success = env.success(s);
  t.total = 5.0 * (t.success ? 1.0 : 0.0) + 10.0 * (t.grasp_dist + t.lift) + 50.0 * (t.tilt + t.ball_bowl);
  return t;
}

double reward_pour(const PlanarEnv& env, const EnvState& s) { return pour_reward_terms(env, s).total; }

LiftRewardTerms lift_reward_terms(const PlanarEnv& env, const EnvState& s) {
  LiftRewardTerms t;
  const double d_left = grip_dist(s.hands[0], s.object);
  const double d_right = grip_dist(s.hands[1], s.object);
  t.left_grasp = std::exp(-8.0 * std::max(d_left - 0.08, 0.0));
  t.right_grasp = std::exp(-8.0 * std::max(d_right - 0.08, 0.0));
  const double s_sync = d_left + d_right;
  t.sync = 4.0 * std::exp(-5.0 * std::max(s_sync - 0.2, 0.0));
  const double dz = s.object.z - s.object_start_z;
  t.lift_height = 10.0 * std::min(std::max(dz / 0.15, 0.0), 1.0);
  const double theta_deg = std::abs(s.object.theta) * kRadToDeg;
  t.tilt_penalty = theta_deg > 30.0 ? std::min(5.0, (theta_deg - 30.0) / 5.0) : 0.0;
  t.total = t.left_grasp + t.right_grasp + t.sync + t.lift_height - t.tilt_penalty;
  (void)env;
  return t;
}

double reward_lift(const PlanarEnv& env, const EnvState& s) { return lift_reward_terms(env, s).total; }

HandoverRewardTerms handover_reward_terms(const PlanarEnv& env, const EnvState& s) {
  HandoverRewardTerms t;
  t.stage = s.handover_stage;
  const double d_left = grip_dist(s.hands[0], s.object);
  const double d_right = grip_dist(s.hands[1], s.object);
  switch (s.handover_stage) {
    case 0:
      t.in_stage = std::exp(-8.0 * std::max(d_right - 0.08, 0.0));
      break;
    case 1: {
      const double d_goal = dist2d(s.object.x, s.object.z, kHandoverX, s.table_z + kHandoverZ);
      t.in_stage = std::exp(-4.0 * d_goal);
      break;
    }
    case 2:
      t.in_stage = std::exp(-8.0 * std::max(d_left - 0.08, 0.0));
      break;
    case 3:
      t.in_stage = std::clamp(d_right / kHandoverReleaseDist, 0.0, 1.0);
      break;
    default:
      t.in_stage = 2.0;  // release held: maximal staged reward 5
      break;
  }
  t.total = static_cast<double>(std::min(s.handover_stage, 3)) + t.in_stage;
  (void)env;
  return t;
}

double reward_handover(const PlanarEnv& env, const EnvState& s) {
  return handover_reward_terms(env, s).total;
}

}  // namespace flywheel::env
