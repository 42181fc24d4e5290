#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flywheel/data/dataset.hpp"
#include "flywheel/data/dataset_io.hpp"
#include "flywheel/env/registry.hpp"
#include "flywheel/util/errors.hpp"

using namespace flywheel;
using namespace flywheel::data;

namespace {

Trajectory make_traj(const std::string& id, const std::string& object_id, const std::string& env_id,
                     double x, Source source = Source::Rollout) {
  Trajectory t;
  t.id = id;
  t.config.object = env::ObjectCatalog::builtin().contains(object_id)
                        ? env::ObjectCatalog::builtin().find(object_id)
                        : env::ObjectSpec{object_id, env::ObjectSpec::Geometry::Disk, 0.025, 0.025, 1.0, "disk"};
  t.config.environment_id = env_id;
  t.config.spatial_pose = {x, 0.0, 0.0};
  t.env_seed = 17;
  t.success = true;
  t.source = source;
  Transition tr;
  tr.observation = {0.1, 0.2, 0.3};
  tr.steps = 2;
  tr.action_dim = 4;
  tr.actions = {0.124999999999999997, -1.0, 0.5, 0.0, 1e-17, 0.25, -0.75, 1.0};
  tr.reward = 3.14159;
  t.transitions.push_back(tr);
  return t;
}

// Dataset whose ledger hits the requested O, E, P counts exactly.
Dataset synthetic(int objects, int envs, int poses) {
  Dataset d("synth", env::TaskKind::Grasp);
  const int n = std::max({objects, envs, poses});
  for (int i = 0; i < n; ++i) {
    d.add(make_traj("t" + std::to_string(i), "obj" + std::to_string(i % objects),
                    "env" + std::to_string(i % envs), 0.05 * (i % poses)));
  }
  return d;
}

}  // namespace

TEST_CASE("diversity ledger reproduces the product accounting") {
  CHECK(synthetic(22, 12, 15).ledger() ==
        DiversityLedger{22, 12, 15, 3960, 22});
  CHECK(synthetic(6, 5, 2).ledger().configs == 60);
  CHECK(synthetic(12, 12, 10).ledger().configs == 1440);

  Dataset empty("e", env::TaskKind::Grasp);
  CHECK(diversity_stats(empty) == DiversityLedger{});

  // Stored ledger always equals recomputation.
  Dataset d = synthetic(4, 3, 5);
  CHECK(d.ledger() == diversity_stats(d));
}

TEST_CASE("pose bucketing on the 1 cm / 5 degree grid") {
  CHECK(pose_bucket({0.051, 0.0, 0.0}) == pose_bucket({0.053, 0.0, 0.0}));
  CHECK(pose_bucket({0.051, 0.0, 0.0}) != pose_bucket({0.059, 0.0, 0.0}));
  CHECK(pose_bucket({0.0, 0.0, 0.01}) == pose_bucket({0.0, 0.0, 0.02}));
  CHECK(pose_bucket({0.0, 0.0, 0.0}) != pose_bucket({0.0, 0.0, 0.09}));
}

TEST_CASE("dataset save/load round-trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "fw_data_test";
  fs::create_directories(dir);

  SUBCASE("structural equality including full-precision doubles") {
    Dataset d("round", env::TaskKind::Grasp);
    d.add(make_traj("a", "disk_s", "e00", 0.1, Source::ScriptedSeed));
    Trajectory aug = make_traj("b", "disk_s", "e01", 0.2, Source::Augmented);
    aug.lineage = {"a"};
    aug.transitions[0].base_actions = aug.transitions[0].actions;
    aug.transitions[0].residual_corrections = {0, 0, 0, 0, 0, 0, 0, 0};
    d.add(aug);

    save_dataset(d, dir / "d.jsonl");
    const Dataset back = load_dataset(dir / "d.jsonl");
    CHECK(back.id() == d.id());
    CHECK(back.size() == d.size());
    CHECK(back.ledger() == d.ledger());
    for (int64_t i = 0; i < d.size(); ++i) {
      const auto& x = d.trajectories()[static_cast<size_t>(i)];
      const auto& y = back.trajectories()[static_cast<size_t>(i)];
      CHECK(x.id == y.id);
      CHECK(x.transitions == y.transitions);
      CHECK(x.lineage == y.lineage);
      CHECK(x.config.spatial_pose == y.config.spatial_pose);
      CHECK(x.env_seed == y.env_seed);
    }
    back.validate_lineage();
  }

  SUBCASE("empty dataset round-trips") {
    Dataset d("empty", env::TaskKind::Pour);
    save_dataset(d, dir / "empty.jsonl");
    const Dataset back = load_dataset(dir / "empty.jsonl");
    CHECK(back.empty());
    CHECK(back.task() == env::TaskKind::Pour);
  }

  SUBCASE("corrupting record 3 fails naming record 3") {
    Dataset d("c", env::TaskKind::Grasp);
    for (int i = 0; i < 5; ++i) d.add(make_traj("t" + std::to_string(i), "disk_s", "e00", 0.01 * i));
    const fs::path p = dir / "corrupt.jsonl";
    save_dataset(d, p);

    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    lines[3][10] = '@';  // record 3 (line 0 is the header)
    std::ofstream out(p, std::ios::trunc);
    for (const auto& l : lines) out << l << "\n";
    out.close();

    CHECK_THROWS_WITH_AS(load_dataset(p), doctest::Contains("record 3"), ConfigError);
  }

  fs::remove_all(dir);
}

TEST_CASE("downsample") {
  Dataset d("ds", env::TaskKind::Grasp);
  for (int i = 0; i < 10; ++i) d.add(make_traj("t" + std::to_string(i), "disk_s", "e00", 0.02 * i));

  SUBCASE("n = count keeps identical membership") {
    const Dataset s = downsample(d, 10, 5);
    for (int i = 0; i < 10; ++i) CHECK(s.trajectories()[i].id == d.trajectories()[i].id);
  }
  SUBCASE("same seed gives identical selection, ledger recomputed") {
    const Dataset a = downsample(d, 4, 123);
    const Dataset b = downsample(d, 4, 123);
    REQUIRE(a.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(a.trajectories()[i].id == b.trajectories()[i].id);
    CHECK(a.ledger() == diversity_stats(a));
  }
  SUBCASE("n greater than count is rejected") { CHECK_THROWS_AS(downsample(d, 11, 1), ConfigError); }
  SUBCASE("selection frequency is uniform within 2 percent") {
    std::vector<int> hits(10, 0);
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) {
      const Dataset sub = downsample(d, 4, static_cast<uint64_t>(s));
      for (const auto& t : sub.trajectories()) hits[static_cast<size_t>(t.id[1] - '0')]++;
    }
    for (int i = 0; i < 10; ++i) {
      CHECK(std::abs(static_cast<double>(hits[i]) / trials - 0.4) <= 0.02);
    }
  }
}
