// Copyright 2026 The Selfplay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "selfplay/ablation.hpp"
#include "selfplay/checkpoint.hpp"
#include "selfplay/replay.hpp"
#include "selfplay/runtime.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::scratch_dir;
using selfplay::testing::thrown_kind;

namespace {

RunConfig tiny(std::vector<std::string> overrides = {}) {
  std::vector<std::string> all = {"seed=5",       "total_steps=4",   "batch_size=24",
                                  "eval.every=0", "checkpoint.every=2",
                                  "log.trajectory_every=1",
                                  "games.TicTacToe=1.0"};
  all.insert(all.end(), overrides.begin(), overrides.end());
  return parse_config("", all);
}

TrainOptions quiet_in(const std::filesystem::path& dir) {
  TrainOptions o;
  o.out_dir = dir;
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("checkpoint round trip through disk") {
  const auto dir = scratch_dir("ckpt");
  const auto result = train(tiny(), quiet_in(dir));
  const Checkpoint& ckpt = result.checkpoint;
  CHECK(ckpt.step == 4);
  CHECK(ckpt.config_hash == config_hash(tiny()));
  CHECK(parse_config(ckpt.config_toml) == tiny());
  const auto path = dir / "checkpoints" / checkpoint_file_name(4);
  CHECK(load_checkpoint(path) == ckpt);
  const auto listed = list_checkpoints(dir / "checkpoints");
  REQUIRE(listed.size() == 2);
  CHECK(listed[0].first == 2);
  CHECK(listed[1].first == 4);
  CHECK(checkpoint_file_name(16) == "step_0016.json");
}

TEST_CASE("malformed checkpoints are reported") {
  const auto dir = scratch_dir("ckpt_bad");
  CHECK(thrown_kind([&] { load_checkpoint(dir / "missing.json"); }) == ErrorKind::kIo);
  write_file_atomic(dir / "bad.json", "{\"format_version\": 1}");
  CHECK(thrown_kind([&] { load_checkpoint(dir / "bad.json"); }) == ErrorKind::kFormat);
  write_file_atomic(dir / "junk.json", "not json");
  CHECK(thrown_kind([&] { load_checkpoint(dir / "junk.json"); }) == ErrorKind::kFormat);
}

TEST_CASE("logged trajectories replay against their snapshot") {
  const auto dir = scratch_dir("replay");
  train(tiny({"total_steps=3", "checkpoint.every=1"}), quiet_in(dir));
  // Step 3 was collected with the policy saved after step 2.
  const auto trajs = read_jsonl(dir / "trajectories/step_0003.jsonl");
  REQUIRE(trajs.size() == 24);
  const Checkpoint before = load_checkpoint(dir / "checkpoints/step_0002.json");
  const ReplayReport ok = replay_trajectories(trajs, &before.policy);
  CHECK(ok.trajectories == 24);
  CHECK(ok.logprobs_checked > 0);
  CHECK(ok.logprob_deviations == 0);
  CHECK(ok.max_logprob_deviation <= 1e-9);

  const Checkpoint after = load_checkpoint(dir / "checkpoints/step_0003.json");
  const ReplayReport drift = replay_trajectories(trajs, &after.policy);
  CHECK(drift.logprob_deviations > 0);

  auto tampered = trajs;
  auto& turn = tampered[5].turns[1];
  turn.obs_key += "x";
  try {
    replay_trajectories(tampered);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kReplayDivergence);
    CHECK(std::string(e.what()).find("trajectory 5 turn 1") != std::string::npos);
  }
  tampered = trajs;
  tampered[2].returns = {tampered[2].returns[0] == 1 ? -1 : 1,
                         tampered[2].returns[0] == 1 ? 1 : -1};
  CHECK(thrown_kind([&] { replay_trajectories(tampered); }) == ErrorKind::kReplayDivergence);
}

TEST_CASE("ablation arms") {
  const RunConfig base = tiny();
  const auto rq2 = ablation_arms("rq2", base);
  REQUIRE(rq2.size() == 4);
  CHECK(rq2[0].name == "selfplay");
  CHECK(rq2[1].config.opponent.kind == OpponentKind::kUniformRandomLegal);
  CHECK(rq2[2].config.opponent.kind == OpponentKind::kScripted);
  CHECK(rq2[2].config.opponent.script == "win-block-else-random");
  CHECK(rq2[3].config.opponent.kind == OpponentKind::kFrozenCheckpoint);
  const auto rq4 = ablation_arms("rq4", base);
  REQUIRE(rq4.size() == 2);
  CHECK(rq4[0].config.rae_enabled);
  CHECK_FALSE(rq4[1].config.rae_enabled);
  CHECK(thrown_kind([&] { ablation_arms("rq9", base); }) == ErrorKind::kConfig);
  CHECK(thrown_kind([&] { ablation_arms("rq2", tiny({"games.KuhnPoker=1.0"})); }) ==
        ErrorKind::kConfig);
}

TEST_CASE("coefficient of variation") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(coefficient_of_variation(v) == doctest::Approx(std::sqrt(1.25) / 2.5));
  CHECK(coefficient_of_variation(std::vector<double>{}) == 0.0);
  CHECK(coefficient_of_variation(std::vector<double>{0.0, 0.0}) == 0.0);
}

TEST_CASE("rq4 suite writes a side-by-side comparison") {
  const auto dir = scratch_dir("rq4");
  const auto result = run_ablation("rq4", tiny({"total_steps=3"}), dir, true, nullptr, 2);
  CHECK(result.arms == std::vector<std::string>{"rae_on@5", "rae_off@5", "rae_on@6",
                                                "rae_off@6"});
  REQUIRE(result.records.size() == 4);
  for (const auto& r : result.records) CHECK(r.size() == 3);
  CHECK(std::filesystem::exists(dir / "rq4_comparison.csv"));
  CHECK(std::filesystem::exists(dir / "rq4_summary.json"));
  CHECK(result.summary.contains("rae_off_cv_higher"));
  CHECK(result.csv.find("rae_off@6:grad_norm") != std::string::npos);
}
