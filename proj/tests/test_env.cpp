#include <cmath>
#include <vector>

#include "doctest.h"
#include "flywheel/env/planar_env.hpp"
#include "flywheel/env/registry.hpp"
#include "flywheel/math/rng.hpp"
#include "flywheel/util/errors.hpp"

using namespace flywheel;
using namespace flywheel::env;

namespace {

ScenarioConfig scenario(const std::string& object_id, const std::string& env_id, double x, double z = 0.0,
                        double theta = 0.0) {
  ScenarioConfig c;
  c.object = ObjectCatalog::builtin().find(object_id);
  c.environment_id = env_id;
  c.spatial_pose = {x, z, theta};
  return c;
}

PlanarEnv make_env(TaskKind task, const ScenarioConfig& c, uint64_t seed = 1) {
  return PlanarEnv::make(task, c, EnvRegistry::builtin(), seed);
}

std::vector<double> zeros(int n) { return std::vector<double>(static_cast<size_t>(n), 0.0); }

// Normalized action that moves a hand toward a wrist target at full speed
// and commands the given aperture.
void steer(std::vector<double>& action, int hand, const Pose2& pose, double tx, double tz, double aperture) {
  action[4 * hand + 0] = std::clamp((tx - pose.x) / kMaxDelta, -1.0, 1.0);
  action[4 * hand + 1] = std::clamp((tz - pose.z) / kMaxDelta, -1.0, 1.0);
  action[4 * hand + 2] = 0.0;
  action[4 * hand + 3] = 2.0 * aperture - 1.0;
}

// Runs a scripted grasp: descend, squeeze with the given press, then lift
// `lift_steps` of +0.01 m. Returns every executed (state, action) pair.
struct Scripted {
  std::vector<EnvState> states;  // states[0] is the reset state
  std::vector<std::vector<double>> actions;
};

Scripted scripted_grasp(const PlanarEnv& env, double press_fraction, int lift_steps) {
  Scripted out;
  EnvState s = env.reset();
  out.states.push_back(s);
  const double hold_aperture =
      std::max(0.0, env.contact_aperture() - press_fraction * kPressWindow);

  auto run = [&](const std::vector<double>& a) {
    out.actions.push_back(a);
    s = env.step(s, a).next;
    out.states.push_back(s);
  };

  // Descend until the grip center sits on the object.
  for (int i = 0; i < 60; ++i) {
    const double tz = s.object.z + kGripDepth;
    if (std::abs(s.hands[0].pose.x - s.object.x) < 1e-9 && std::abs(s.hands[0].pose.z - tz) < 1e-9) break;
    auto a = zeros(4);
    steer(a, 0, s.hands[0].pose, s.object.x, tz, 1.0);
    run(a);
  }
  // Close.
  for (int i = 0; i < 6; ++i) {
    auto a = zeros(4);
    steer(a, 0, s.hands[0].pose, s.hands[0].pose.x, s.hands[0].pose.z, hold_aperture);
    run(a);
  }
  // Lift.
  for (int i = 0; i < lift_steps; ++i) {
    auto a = zeros(4);
    a[1] = 0.01 / kMaxDelta;
    a[3] = 2.0 * hold_aperture - 1.0;
    run(a);
  }
  return out;
}

}  // namespace

TEST_CASE("reset is deterministic and pose comes from the config") {
  const auto cfg = scenario("disk_s", "e03", 0.12);
  const auto env = make_env(TaskKind::Grasp, cfg, 42);
  CHECK(env.reset() == env.reset());

  // Resting contact: object z equals the table height.
  EnvState s = env.reset();
  CHECK(s.object.z == s.table_z);

  // The seed drives only environment-parameter jitter, never the pose.
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const auto e = make_env(TaskKind::Grasp, cfg, seed);
    const EnvState st = e.reset();
    CHECK(st.object.x == cfg.spatial_pose.x);
    CHECK(st.object.z - st.table_z == cfg.spatial_pose.z);
    CHECK(st.object.theta == cfg.spatial_pose.theta);
  }

  CHECK_THROWS_AS(make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.9)).reset(), ConfigError);
}

TEST_CASE("zero action on a resting object changes only the step count") {
  const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
  EnvState s0 = env.reset();
  EnvAction a;
  a.hands.push_back({0.0, 0.0, 0.0, 1.0});
  StepResult r = env.step(s0, a);
  EnvState expect = s0;
  expect.step_count = 1;
  CHECK(r.next == expect);
  CHECK_FALSE(r.terminated);
}

TEST_CASE("step is a pure deterministic function") {
  const auto env = make_env(TaskKind::Pour, scenario("cup_s", "e02", -0.1), 7);
  EnvState s = env.reset();
  std::vector<double> a = {0.3, -0.6, 0.1, -0.2};
  const StepResult r1 = env.step(s, a);
  const StepResult r2 = env.step(s, a);
  CHECK(r1.next == r2.next);
  CHECK(r1.reward == r2.reward);
}

TEST_CASE("rigid attachment lifts the object exactly with the hand") {
  const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
  auto run = scripted_grasp(env, 0.7, 25);
  const EnvState& last = run.states.back();
  CHECK(last.following);
  CHECK(last.object.z - last.object_start_z == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(env.success(last));
}

TEST_CASE("episode replays bit-exactly and succeeds at the same step") {
  const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e05", 0.08), 33);
  auto run = scripted_grasp(env, 0.7, 25);

  int success_at = -1;
  for (size_t i = 0; i < run.states.size(); ++i) {
    if (env.success(run.states[i])) {
      success_at = static_cast<int>(i);
      break;
    }
  }
  REQUIRE(success_at > 0);

  EnvState s = env.reset();
  for (size_t i = 0; i < run.actions.size(); ++i) {
    s = env.step(s, run.actions[i]).next;
    CHECK(s == run.states[i + 1]);
    if (static_cast<int>(i + 1) == success_at) CHECK(env.success(s));
    if (static_cast<int>(i + 1) < success_at) CHECK_FALSE(env.success(s));
  }
}

TEST_CASE("fuzz: the object never penetrates the table, free objects never rise") {
  math::Rng rng(99);
  const auto env = make_env(TaskKind::Grasp, scenario("disk_m", "e04", 0.05), 3);
  EnvState s = env.reset();
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> a(4);
    for (auto& v : a) v = rng.uniform(-1, 1);
    const double prev_z = s.object.z;
    StepResult r = env.step(s, a);
    CHECK(r.next.object.z >= r.next.table_z - 1e-9);
    if (!r.next.following) {
      CHECK(r.next.object.z <= prev_z + 1e-12);
    }
    s = r.terminated ? env.reset() : r.next;
  }
}

TEST_CASE("grasp reward formula pins") {
  const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
  EnvState s = env.reset();

  SUBCASE("sum distance at the 0.05 slack and object at target height") {
    // Grip center on the object, fingers at half-gap 0.02 each, thumb point
    // 0.01 above: sum distance = 0.02 + 0.02 + 0.01 = 0.05.
    s.hands[0].pose = {s.object.x, s.object.z + kGripDepth, 0.0};
    s.hands[0].aperture = (2.0 * 0.02) / kFingerSpan;
    s.object.z = s.object_start_z + 0.2;
    s.hands[0].pose.z = s.object.z + kGripDepth;
    const auto t = grasp_reward_terms(env, s);
    CHECK(std::abs(t.finger_sum_dist - 0.05) <= 1e-12);
    CHECK(std::abs(t.total - 21.0) <= 1e-9);
  }
  SUBCASE("height clamp branch gives exactly zero") {
    s.hands[0].pose = {s.object.x, s.object.z + kGripDepth, 0.0};
    s.hands[0].aperture = (2.0 * 0.02) / kFingerSpan;
    s.object.z = s.object_start_z - 0.01;  // |z_target - z| = 0.21
    s.hands[0].pose.z = s.object.z + kGripDepth;
    const auto t = grasp_reward_terms(env, s);
    CHECK(std::abs(t.total - 0.0) <= 1e-9);
  }
  SUBCASE("sum distance 0.25 gives finger term exp(-1)") {
    // Closed fingers 0.08 above the object: distances 0.08, 0.08, 0.09.
    s.hands[0].aperture = 0.0;
    s.hands[0].pose = {s.object.x, s.object.z + kGripDepth + 0.08, 0.0};
    const auto t = grasp_reward_terms(env, s);
    CHECK(std::abs(t.finger_sum_dist - 0.25) <= 1e-12);
    CHECK(std::abs(t.finger_term - std::exp(-1.0)) <= 1e-9);
  }
}

TEST_CASE("pour reward formula pins") {
  const auto env = make_env(TaskKind::Pour, scenario("cup_s", "e00", 0.0));
  EnvState s = env.reset();

  SUBCASE("upright cup has zero tilt term") {
    s.object.theta = 0.0;
    CHECK(pour_reward_terms(env, s).tilt == 0.0);
  }
  SUBCASE("ball within 2 cm of the bowl maxes the ball term") {
    s.balls[0].released = true;
    s.balls[0].x = s.bowl_x + 0.015;
    const auto t = pour_reward_terms(env, s);
    CHECK(std::abs(t.ball_bowl - 10.0) <= 1e-9);
  }
  SUBCASE("zero grip distance gives 0.5") {
    s.hands[0].pose = {s.object.x, s.object.z + kGripDepth, 0.0};
    const auto t = pour_reward_terms(env, s);
    CHECK(std::abs(t.grasp_dist - 0.5) <= 1e-9);
  }
}

TEST_CASE("lift reward formula pins") {
  const auto env = make_env(TaskKind::Lift, scenario("crate_s", "e00", 0.0));
  EnvState s = env.reset();

  SUBCASE("boundary plug-in totals 16") {
    s.object.z = s.object_start_z + 0.15;
    s.object.theta = 0.0;
    s.hands[0].pose = {s.object.x - 0.08, s.object.z + kGripDepth, 0.0};
    s.hands[1].pose = {s.object.x + 0.08, s.object.z + kGripDepth, 0.0};
    const auto t = lift_reward_terms(env, s);
    CHECK(std::abs(t.left_grasp - 1.0) <= 1e-9);
    CHECK(std::abs(t.right_grasp - 1.0) <= 1e-9);
    CHECK(std::abs(t.sync - 4.0) <= 1e-9);
    CHECK(std::abs(t.lift_height - 10.0) <= 1e-9);
    CHECK(t.tilt_penalty == 0.0);
    CHECK(std::abs(t.total - 16.0) <= 1e-9);
  }
  SUBCASE("tilt threshold boundary and cap") {
    s.object.theta = 30.0 / 57.29577951308232;
    CHECK(std::abs(lift_reward_terms(env, s).tilt_penalty) <= 1e-9);
    s.object.theta = 60.0 / 57.29577951308232;
    CHECK(std::abs(lift_reward_terms(env, s).tilt_penalty - 5.0) <= 1e-9);
  }
}

TEST_CASE("handover reward stages") {
  const auto env = make_env(TaskKind::Handover, scenario("rod_s", "e00", 0.0));
  EnvState s = env.reset();

  SUBCASE("start of episode: right-grasp term alone") {
    s.handover_stage = 0;
    const double d_right =
        std::hypot(PlanarEnv::grip_center(s.hands[1]).x - s.object.x,
                   PlanarEnv::grip_center(s.hands[1]).z - s.object.z);
    const auto t = handover_reward_terms(env, s);
    CHECK(std::abs(t.total - std::exp(-8.0 * std::max(d_right - 0.08, 0.0))) <= 1e-12);
  }
  SUBCASE("terminal success posture gives the staged maximum") {
    s.handover_stage = 4;
    CHECK(handover_reward_terms(env, s).total == 5.0);
  }
}

TEST_CASE("success predicates") {
  SUBCASE("grasp: lifted above 20 cm") {
    const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
    EnvState s = env.reset();
    s.object.z = s.object_start_z + 0.21;
    CHECK(env.success(s));
    s.object.z = s.object_start_z + 0.19;
    CHECK_FALSE(env.success(s));
  }
  SUBCASE("pour: released ball within 2 cm horizontally") {
    const auto env = make_env(TaskKind::Pour, scenario("cup_s", "e00", 0.0));
    EnvState s = env.reset();
    s.balls[1].released = true;
    s.balls[1].x = s.bowl_x + 0.019;
    CHECK(env.success(s));
    s.balls[1].x = s.bowl_x + 0.021;
    CHECK_FALSE(env.success(s));
    s.balls[1].x = s.bowl_x + 0.019;
    s.balls[1].released = false;  // a ball still inside the cup does not count
    CHECK_FALSE(env.success(s));
  }
  SUBCASE("lift: above 15 cm") {
    const auto env = make_env(TaskKind::Lift, scenario("crate_s", "e00", 0.0));
    EnvState s = env.reset();
    s.object.z = s.object_start_z + 0.151;
    CHECK(env.success(s));
  }
  SUBCASE("handover: ten consecutive hold steps") {
    const auto env = make_env(TaskKind::Handover, scenario("rod_s", "e00", 0.0));
    EnvState s = env.reset();
    // Lift the whole scene into the hold posture: object held by the left
    // hand 0.22 m up, right hand far away.
    s.object.z = s.object_start_z + 0.22;
    s.hands[0].pose = {s.object.x, s.object.z + kGripDepth, 0.0};
    s.hands[0].aperture = env.contact_aperture();
    s.hands[0].cmd_aperture = 0.0;

    std::vector<double> a(8, 0.0);
    a[3] = -1.0;  // left stays squeezed
    a[7] = 1.0;   // right stays open
    int streak_true_at = -1;
    for (int i = 1; i <= 12; ++i) {
      StepResult r = env.step(s, a);
      s = r.next;
      if (i <= 9) CHECK(s.hold_streak == i);
      if (r.success && streak_true_at < 0) streak_true_at = i;
    }
    CHECK(streak_true_at == 10);
  }
}

TEST_CASE("timeout predicates") {
  const auto genv = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
  EnvState s = genv.reset();
  s.step_count = 600;
  CHECK_FALSE(genv.timeout(s));
  s.step_count = 601;
  CHECK(genv.timeout(s));

  const auto henv = make_env(TaskKind::Handover, scenario("rod_s", "e00", 0.0));
  EnvState hs = henv.reset();
  hs.step_count = 700;
  CHECK_FALSE(henv.timeout(hs));
  hs.step_count = 801;
  CHECK(henv.timeout(hs));

  // Success ends the episode with reason success, never timeout.
  const auto env = make_env(TaskKind::Grasp, scenario("disk_s", "e00", 0.0));
  auto run = scripted_grasp(env, 0.7, 25);
  for (size_t i = 1; i < run.states.size(); ++i) {
    if (env.success(run.states[i])) {
      StepResult r = env.step(run.states[i - 1], run.actions[i - 1]);
      CHECK(r.terminated);
      CHECK(r.reason == TerminationReason::Success);
      break;
    }
  }
}

TEST_CASE("registry and catalog round-trip through files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fw_env_test";
  fs::create_directories(dir);

  const auto reg = EnvRegistry::builtin();
  reg.save(dir / "envs.json");
  const auto reg2 = EnvRegistry::load(dir / "envs.json");
  CHECK(reg2.pool().size() == reg.pool().size());
  CHECK(reg2.find("e07").friction == reg.find("e07").friction);

  const auto cat = ObjectCatalog::builtin();
  cat.save(dir / "objects.json");
  const auto cat2 = ObjectCatalog::load(dir / "objects.json");
  CHECK(cat2.items().size() == cat.items().size());
  CHECK(cat2.find("crate_s").density_scale == cat.find("crate_s").density_scale);
  CHECK_THROWS_AS(cat2.find("nope"), ConfigError);
  fs::remove_all(dir);
}
