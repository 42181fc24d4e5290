#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flywheel::env {

enum class TaskKind { Grasp, Pour, Lift, Handover };

const char* task_name(TaskKind t);
TaskKind task_from_name(const std::string& name);

/// Grasp and Pour are single-hand; Lift and Handover use two hands.
inline int hand_count(TaskKind t) { return (t == TaskKind::Lift || t == TaskKind::Handover) ? 2 : 1; }
inline bool has_second_object(TaskKind t) { return t == TaskKind::Pour; }

/// Planar pose: horizontal x, vertical z, in-plane rotation theta.
struct Pose2 {
  double x = 0.0;
  double z = 0.0;
  double theta = 0.0;

  bool operator==(const Pose2&) const = default;
};

struct ObjectSpec {
  enum class Geometry { Disk, Box, Capsule };

  std::string id;
  Geometry geometry = Geometry::Disk;
  double dim_a = 0.025;         // disk radius / box half-width / capsule half-length (m)
  double dim_b = 0.025;         // box half-height / capsule radius (m)
  double density_scale = 1.0;   // relative mass multiplier, valid range [0.1, 50]
  std::string category;

  /// Effective grip half-gap: the finger opening at which the fingers meet
  /// the object surface.
  double grip_radius() const;
  double area() const;
  /// Mass in units of the reference disk (r=0.025, density 1).
  double mass() const;
  void validate() const;
};

/// Physical parameters behind an environment id. Friction, table height
/// offset and gravity jitter are the planar stand-ins for lighting/tabletop
/// variation: they perturb the dynamics, so environment generalization stays
/// a real axis.
struct EnvParams {
  std::string id;
  double friction = 1.0;      // grip friction multiplier
  double table_offset = 0.0;  // table height z0 (m)
  double gravity = 9.81;      // m/s^2
  double jitter = 0.0;        // per-reset relative jitter scale on friction/gravity
};

/// One (object, environment, spatial pose) triple; the unit of diversity
/// accounting. spatial_pose.z is measured relative to the tabletop.
struct ScenarioConfig {
  ObjectSpec object;
  std::string environment_id;
  Pose2 spatial_pose;
  std::optional<ObjectSpec> second_object;  // bowl, Pour only
};

struct HandState {
  Pose2 pose;  // wrist pose, world frame
  double vx = 0.0, vz = 0.0, vtheta = 0.0;
  double aperture = 1.0;  // in [0,1], 1 = fully open
  double aperture_vel = 0.0;
  double cmd_aperture = 1.0;  // last commanded target; drives grip press
  bool gripping = false;

  bool operator==(const HandState&) const = default;
};

struct BallState {
  double x = 0.0, z = 0.0, vz = 0.0;
  bool released = false;

  bool operator==(const BallState&) const = default;
};

struct EnvState {
  std::vector<HandState> hands;
  Pose2 object;
  double ovx = 0.0, ovz = 0.0, ovtheta = 0.0;
  std::vector<BallState> balls;  // Pour only
  bool following = false;        // object currently follows the gripping hand(s)
  Pose2 follow_offset;           // object pose expressed in the grip frame
  int grip_set = 0;              // bitmask of hands the follow frame was captured from
  int step_count = 0;
  double table_z = 0.0;
  double object_start_z = 0.0;
  double mu = 1.0;      // resolved friction (after per-reset jitter)
  double gravity = 9.81;
  int hold_streak = 0;      // Handover: consecutive steps the release-hold condition held
  int handover_stage = 0;   // Handover: latched progress stage 0..4
  double bowl_x = 0.0, bowl_z = 0.0;
  bool has_bowl = false;

  bool operator==(const EnvState&) const = default;
};

/// Per-hand command: bounded pose delta plus target aperture.
struct EnvAction {
  struct HandCmd {
    double dx = 0.0, dz = 0.0, dtheta = 0.0;
    double aperture_target = 1.0;
  };
  std::vector<HandCmd> hands;
};

enum class TerminationReason { None, Success, Timeout };

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool success = false;
  bool terminated = false;
  TerminationReason reason = TerminationReason::None;
};

// Kinematic constants shared by the environment, the scripted experts and
// the augmentor.
inline constexpr double kDt = 0.05;               // s per step
inline constexpr double kMaxDelta = 0.02;         // m per step, per axis
inline constexpr double kMaxDeltaTheta = 0.1;     // rad per step
inline constexpr double kApertureRate = 0.25;     // aperture units per step
inline constexpr double kGripDepth = 0.05;        // grip center below the wrist (m)
inline constexpr double kFingerSpan = 0.12;       // full finger gap at aperture 1 (m)
inline constexpr double kGraspRadius = 0.05;      // grip zone radius (m)
inline constexpr double kDetachRadius = 0.06;     // grip lost beyond this (m)
inline constexpr double kPressWindow = 0.25;      // aperture units from contact to full press
inline constexpr double kPressAttach = 0.15;      // press needed to begin gripping
inline constexpr double kPressDetach = 0.10;      // press below which grip is lost
inline constexpr double kHandCapacity = 2.5;      // mass units at full press, friction 1
inline constexpr double kSpillAngle = 1.0;        // rad; balls leave the cup rim beyond this
inline constexpr double kCupRim = 0.06;           // rim offset from cup center (m)
inline constexpr int kBallCount = 3;
inline constexpr double kBowlX = 0.28;            // bowl position, Pour task
inline constexpr double kHandoverX = 0.0;         // handover rendezvous point
inline constexpr double kHandoverZ = 0.22;        //   (relative to tabletop)
inline constexpr double kWorkspaceX = 0.55;
inline constexpr double kWorkspaceZ = 0.80;
inline constexpr double kResetMaxX = 0.45;
inline constexpr double kResetMaxZ = 0.30;
inline constexpr int kTimeoutSteps = 600;
inline constexpr int kTimeoutStepsHandover = 800;
inline constexpr double kGraspSuccessHeight = 0.20;
inline constexpr double kPourSuccessDist = 0.02;
inline constexpr double kLiftSuccessHeight = 0.15;
inline constexpr double kHandoverHeight = 0.15;
inline constexpr double kHandoverReleaseDist = 0.15;
inline constexpr double kHandoverHoldDist = 0.10;
inline constexpr int kHandoverHoldSteps = 10;

/// Observation layout (fixed ordering, layout version 1):
///   s_obj  = per object: [x, z, theta, vx, vz, vtheta]            (6)
///   s_prop = per hand:   [x, z, theta, vx, vz, vtheta, a, a_vel]  (8)
/// obs = s_obj (+ bowl s_obj for Pour) ++ s_prop per hand.
inline int obs_dim(TaskKind t) { return 6 * (1 + (has_second_object(t) ? 1 : 0)) + 8 * hand_count(t); }
/// Normalized action: per hand [dx, dz, dtheta, aperture] each in [-1, 1].
inline int action_dim(TaskKind t) { return 4 * hand_count(t); }

}  // namespace flywheel::env
