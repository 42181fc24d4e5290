#include "flywheel/env/planar_env.hpp"

#include <algorithm>
#include <cmath>

#include "flywheel/math/rng.hpp"
#include "flywheel/util/errors.hpp"

namespace flywheel::env {

namespace {

double clampd(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

Pose2 local_to_world(const Pose2& frame, const Pose2& local) {
  const double c = std::cos(frame.theta), s = std::sin(frame.theta);
  return Pose2{frame.x + c * local.x - s * local.z, frame.z + s * local.x + c * local.z,
               frame.theta + local.theta};
}

Pose2 world_to_local(const Pose2& frame, const Pose2& world) {
  const double c = std::cos(frame.theta), s = std::sin(frame.theta);
  const double dx = world.x - frame.x, dz = world.z - frame.z;
  return Pose2{c * dx + s * dz, -s * dx + c * dz, world.theta - frame.theta};
}

double dist2d(double ax, double az, double bx, double bz) { return std::hypot(ax - bx, az - bz); }

double grip_distance(const HandState& hand, const Pose2& object) {
  const Pose2 gc = PlanarEnv::grip_center(hand);
  return dist2d(gc.x, gc.z, object.x, object.z);
}

/// Frame spanned by the gripping hands: one hand gives its grip frame, two
/// hands give the midpoint frame oriented along the hand-to-hand axis.
Pose2 grip_frame(const EnvState& s, int mask) {
  std::vector<Pose2> centers;
  for (size_t i = 0; i < s.hands.size(); ++i) {
    if (mask & (1 << i)) centers.push_back(PlanarEnv::grip_center(s.hands[i]));
  }
  if (centers.size() == 1) {
    Pose2 f = centers[0];
    for (size_t i = 0; i < s.hands.size(); ++i) {
      if (mask & (1 << i)) f.theta = s.hands[i].pose.theta;
    }
    return f;
  }
  Pose2 f;
  f.x = 0.5 * (centers[0].x + centers[1].x);
  f.z = 0.5 * (centers[0].z + centers[1].z);
  f.theta = std::atan2(centers[1].z - centers[0].z, centers[1].x - centers[0].x);
  return f;
}

}  // namespace

PlanarEnv::PlanarEnv(TaskKind task, ScenarioConfig config, EnvParams params, uint64_t seed)
    : task_(task), config_(std::move(config)), params_(std::move(params)), seed_(seed) {
  config_.object.validate();
  if (task_ == TaskKind::Pour && !config_.second_object.has_value()) {
    ObjectSpec bowl;
    bowl.id = "bowl";
    bowl.geometry = ObjectSpec::Geometry::Box;
    bowl.dim_a = 0.05;
    bowl.dim_b = 0.015;
    bowl.category = "bowl";
    config_.second_object = bowl;
  }
}

PlanarEnv PlanarEnv::make(TaskKind task, const ScenarioConfig& config, const EnvRegistry& registry,
                          uint64_t seed) {
  return PlanarEnv(task, config, registry.find(config.environment_id), seed);
}

Pose2 PlanarEnv::grip_center(const HandState& hand) {
  return local_to_world(hand.pose, Pose2{0.0, -kGripDepth, 0.0});
}

std::vector<Pose2> PlanarEnv::home_poses(TaskKind task) {
  if (hand_count(task) == 1) return {Pose2{0.0, 0.30, 0.0}};
  return {Pose2{-0.25, 0.30, 0.0}, Pose2{0.25, 0.30, 0.0}};
}

double PlanarEnv::contact_aperture() const {
  return clampd(2.0 * config_.object.grip_radius() / kFingerSpan, 0.05, 1.0);
}

double PlanarEnv::press(const HandState& hand, const Pose2& object) const {
  if (grip_distance(hand, object) > kDetachRadius) return 0.0;
  if (hand.aperture > contact_aperture() + 0.02) return 0.0;  // fingers not at the surface yet
  return clampd((contact_aperture() - hand.cmd_aperture) / kPressWindow, 0.0, 1.0);
}

EnvState PlanarEnv::reset() const {
  const Pose2& pose = config_.spatial_pose;
  if (std::abs(pose.x) > kResetMaxX || pose.z < 0.0 || pose.z > kResetMaxZ) {
    throw ConfigError("scenario pose (" + std::to_string(pose.x) + ", " + std::to_string(pose.z) +
                      ") outside the workspace");
  }
  EnvState s;
  s.table_z = params_.table_offset;

  math::Rng jitter(math::derive_seed(seed_, {0x5eedull}));
  s.mu = params_.friction * (1.0 + params_.jitter * jitter.uniform(-1.0, 1.0));
  s.gravity = params_.gravity * (1.0 + params_.jitter * jitter.uniform(-1.0, 1.0));

  for (const Pose2& home : home_poses(task_)) {
    HandState h;
    h.pose = Pose2{home.x, s.table_z + home.z, home.theta};
    s.hands.push_back(h);
  }

  s.object = Pose2{pose.x, s.table_z + pose.z, pose.theta};
  s.object_start_z = s.object.z;

  if (task_ == TaskKind::Pour) {
    s.has_bowl = true;
    s.bowl_x = kBowlX;
    s.bowl_z = s.table_z;
    for (int i = 0; i < kBallCount; ++i) {
      BallState b;
      const Pose2 local{0.004 * (i - (kBallCount - 1) / 2.0), 0.01, 0.0};
      const Pose2 world = local_to_world(s.object, local);
      b.x = world.x;
      b.z = world.z;
      s.balls.push_back(b);
    }
  }
  return s;
}

EnvAction PlanarEnv::action_from_normalized(std::span<const double> normalized) const {
  if (static_cast<int>(normalized.size()) != action_dim(task_)) {
    throw ConfigError("action has " + std::to_string(normalized.size()) + " dims, expected " +
                      std::to_string(action_dim(task_)));
  }
  EnvAction a;
  for (int h = 0; h < hands(); ++h) {
    EnvAction::HandCmd cmd;
    cmd.dx = clampd(normalized[4 * h + 0], -1.0, 1.0) * kMaxDelta;
    cmd.dz = clampd(normalized[4 * h + 1], -1.0, 1.0) * kMaxDelta;
    cmd.dtheta = clampd(normalized[4 * h + 2], -1.0, 1.0) * kMaxDeltaTheta;
    cmd.aperture_target = (clampd(normalized[4 * h + 3], -1.0, 1.0) + 1.0) / 2.0;
    a.hands.push_back(cmd);
  }
  return a;
}

StepResult PlanarEnv::step(const EnvState& state, std::span<const double> normalized) const {
  return step(state, action_from_normalized(normalized));
}

StepResult PlanarEnv::step(const EnvState& state, const EnvAction& action) const {
  if (action.hands.size() != state.hands.size()) {
    throw ConfigError("action commands " + std::to_string(action.hands.size()) + " hands, state has " +
                      std::to_string(state.hands.size()));
  }
  EnvState s = state;

  // 1. Hands move kinematically under per-step delta limits.
  for (size_t i = 0; i < s.hands.size(); ++i) {
    HandState& h = s.hands[i];
    const auto& cmd = action.hands[i];
    const Pose2 before = h.pose;
    h.pose.x = clampd(before.x + clampd(cmd.dx, -kMaxDelta, kMaxDelta), -kWorkspaceX, kWorkspaceX);
    h.pose.z = clampd(before.z + clampd(cmd.dz, -kMaxDelta, kMaxDelta), s.table_z, s.table_z + kWorkspaceZ);
    h.pose.theta = before.theta + clampd(cmd.dtheta, -kMaxDeltaTheta, kMaxDeltaTheta);
    h.vx = (h.pose.x - before.x) / kDt;
    h.vz = (h.pose.z - before.z) / kDt;
    h.vtheta = (h.pose.theta - before.theta) / kDt;

    h.cmd_aperture = clampd(cmd.aperture_target, 0.0, 1.0);
    const double prev_aperture = h.aperture;
    double a = prev_aperture + clampd(h.cmd_aperture - prev_aperture, -kApertureRate, kApertureRate);
    if (grip_distance(h, state.object) <= kGraspRadius) {
      a = std::max(a, contact_aperture());  // fingers stop at the object surface
    }
    h.aperture = clampd(a, 0.0, 1.0);
    h.aperture_vel = (h.aperture - prev_aperture) / kDt;
  }

  // 2. Grip transitions (with hysteresis), then object motion, then balls.
  update_grips(s);
  update_object(s, state);
  if (task_ == TaskKind::Pour) update_balls(s);

  s.step_count = state.step_count + 1;
  if (task_ == TaskKind::Handover) update_handover_progress(s);

  StepResult r;
  r.reward = reward(s);
  r.success = success(s);
  if (r.success) {
    r.terminated = true;
    r.reason = TerminationReason::Success;
  } else if (timeout(s)) {
    r.terminated = true;
    r.reason = TerminationReason::Timeout;
  }
  r.next = std::move(s);
  return r;
}

void PlanarEnv::update_grips(EnvState& s) const {
  for (auto& h : s.hands) {
    const double d = grip_distance(h, s.object);
    const double p = press(h, s.object);
    if (!h.gripping) {
      h.gripping = d <= kGraspRadius && p >= kPressAttach;
    } else {
      h.gripping = d <= kDetachRadius && p >= kPressDetach;
    }
  }
}

void PlanarEnv::update_object(EnvState& s, const EnvState& prev) const {
  int mask = 0;
  double capacity = 0.0;
  for (size_t i = 0; i < s.hands.size(); ++i) {
    if (s.hands[i].gripping) {
      mask |= 1 << i;
      capacity += press(s.hands[i], s.object) * s.mu * kHandCapacity;
    }
  }

  bool can_follow = mask != 0 && capacity >= config_.object.mass();
  if (can_follow) {
    const Pose2 frame = grip_frame(s, mask);
    Pose2 offset = s.follow_offset;
    if (!prev.following || mask != prev.grip_set) offset = world_to_local(frame, prev.object);
    const Pose2 next = local_to_world(frame, offset);
    if (next.z < s.table_z) {
      // Pressing the object into the table breaks the grip.
      for (auto& h : s.hands) h.gripping = false;
      can_follow = false;
    } else {
      s.follow_offset = offset;
      s.grip_set = mask;
      s.ovx = (next.x - prev.object.x) / kDt;
      s.ovz = (next.z - prev.object.z) / kDt;
      s.ovtheta = (next.theta - prev.object.theta) / kDt;
      s.object = next;
      s.following = true;
    }
  }
  if (!can_follow) {
    s.following = false;
    s.grip_set = 0;
    s.ovx = 0.0;
    s.ovtheta = 0.0;
    double vz = (prev.following ? 0.0 : prev.ovz) - s.gravity * kDt;
    double z = prev.object.z + vz * kDt;
    if (z <= s.table_z) {
      z = s.table_z;
      vz = 0.0;
    }
    s.object.z = z;
    s.ovz = vz;
  }
}

void PlanarEnv::update_balls(EnvState& s) const {
  const bool spilling = std::abs(s.object.theta) > kSpillAngle;
  for (size_t i = 0; i < s.balls.size(); ++i) {
    BallState& b = s.balls[i];
    if (!b.released) {
      if (spilling) {
        const Pose2 rim = local_to_world(s.object, Pose2{0.003 * (static_cast<double>(i) - 1.0), kCupRim, 0.0});
        b.released = true;
        b.x = rim.x;
        b.z = rim.z;
        b.vz = 0.0;
      } else {
        const Pose2 world =
            local_to_world(s.object, Pose2{0.004 * (static_cast<double>(i) - (kBallCount - 1) / 2.0), 0.01, 0.0});
        b.x = world.x;
        b.z = world.z;
        b.vz = 0.0;
      }
    } else {
      b.vz -= s.gravity * kDt;
      b.z += b.vz * kDt;
      if (b.z <= s.bowl_z) {
        b.z = s.bowl_z;
        b.vz = 0.0;
      }
    }
  }
}

void PlanarEnv::update_handover_progress(EnvState& s) const {
  const double d_left = grip_distance(s.hands[0], s.object);
  const double d_right = grip_distance(s.hands[1], s.object);
  const double lifted = s.object.z - s.object_start_z;
  const bool hold = lifted > kHandoverHeight && d_right > kHandoverReleaseDist && d_left < kHandoverHoldDist;
  s.hold_streak = hold ? s.hold_streak + 1 : 0;

  if (s.handover_stage < 1 && s.hands[1].gripping) s.handover_stage = 1;
  const double d_goal = dist2d(s.object.x, s.object.z, kHandoverX, s.table_z + kHandoverZ);
  if (s.handover_stage == 1 && d_goal <= 0.06) s.handover_stage = 2;
  if (s.handover_stage == 2 && s.hands[0].gripping) s.handover_stage = 3;
  if (s.handover_stage == 3 && hold) s.handover_stage = 4;
}

bool PlanarEnv::success(const EnvState& s) const {
  switch (task_) {
    case TaskKind::Grasp:
      return s.object.z - s.object_start_z > kGraspSuccessHeight;
    case TaskKind::Pour:
      for (const auto& b : s.balls) {
        if (b.released && std::abs(b.x - s.bowl_x) < kPourSuccessDist) return true;
      }
      return false;
    case TaskKind::Lift:
      return s.object.z - s.object_start_z > kLiftSuccessHeight;
    case TaskKind::Handover:
      return s.hold_streak >= kHandoverHoldSteps;
  }
  return false;
}

bool PlanarEnv::timeout(const EnvState& s) const {
  const int limit = task_ == TaskKind::Handover ? kTimeoutStepsHandover : kTimeoutSteps;
  return s.step_count > limit;
}

double PlanarEnv::reward(const EnvState& s) const {
  switch (task_) {
    case TaskKind::Grasp: return reward_grasp(*this, s);
    case TaskKind::Pour: return reward_pour(*this, s);
    case TaskKind::Lift: return reward_lift(*this, s);
    case TaskKind::Handover: return reward_handover(*this, s);
  }
  return 0.0;
}

std::vector<double> PlanarEnv::observe(const EnvState& s) const {
  std::vector<double> obs;
  obs.reserve(static_cast<size_t>(obs_dim(task_)));
  obs.push_back(s.object.x);
  obs.push_back(s.object.z);
  obs.push_back(s.object.theta);
  obs.push_back(s.ovx);
  obs.push_back(s.ovz);
  obs.push_back(s.ovtheta);
  if (has_second_object(task_)) {
    obs.push_back(s.bowl_x);
    obs.push_back(s.bowl_z);
    obs.push_back(0.0);
    obs.push_back(0.0);
    obs.push_back(0.0);
    obs.push_back(0.0);
  }
  for (const auto& h : s.hands) {
    obs.push_back(h.pose.x);
    obs.push_back(h.pose.z);
    obs.push_back(h.pose.theta);
    obs.push_back(h.vx);
    obs.push_back(h.vz);
    obs.push_back(h.vtheta);
    obs.push_back(h.aperture);
    obs.push_back(h.aperture_vel);
  }
  return obs;
}

std::vector<Pose2> grasp_contact_points(const HandState& hand) {
  const Pose2 c = PlanarEnv::grip_center(hand);
  const double half_gap = 0.5 * kFingerSpan * hand.aperture;
  return {
      local_to_world(Pose2{c.x, c.z, hand.pose.theta}, Pose2{-half_gap, 0.0, 0.0}),
      local_to_world(Pose2{c.x, c.z, hand.pose.theta}, Pose2{half_gap, 0.0, 0.0}),
      local_to_world(Pose2{c.x, c.z, hand.pose.theta}, Pose2{0.0, 0.01, 0.0}),
  };
}

}  // namespace flywheel::env
