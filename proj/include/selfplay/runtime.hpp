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

#ifndef SELFPLAY_RUNTIME_HPP_
#define SELFPLAY_RUNTIME_HPP_

// Synchronous actor-learner loop. Each step: freeze a snapshot, let K actors
// play batch_size games against it, compute role-conditioned advantages,
// take one proximal update, log, evaluate and checkpoint on cadence.

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "selfplay/advantage.hpp"
#include "selfplay/checkpoint.hpp"
#include "selfplay/config.hpp"
#include "selfplay/learner.hpp"
#include "selfplay/policy.hpp"
#include "selfplay/trajectory.hpp"

namespace selfplay {

inline constexpr int kMaxNonFiniteStreak = 3;

// Seed of training step `step` (1-based) for a run seeded with `run_seed`.
std::uint64_t step_seed(std::uint64_t run_seed, int step);

struct Assignment {
  GameId game = GameId::kKuhnPoker;
  std::uint64_t seed = 0;
};

// Game and seed of every batch slot, drawn from `step_seed` alone.
std::vector<Assignment> assign_batch(const RunConfig& config, std::uint64_t step_seed);

struct CollectStats {
  int retries = 0;
};

// Exactly config.batch_size trajectories in assignment order. `frozen` is
// the opponent snapshot for kFrozenCheckpoint. Failed games are replayed
// with a derived seed up to config.max_env_retries times, then rethrown.
std::vector<Trajectory> collect_batch(const PolicySnapshot& snapshot, const RunConfig& config,
                                      std::uint64_t step_seed,
                                      const PolicySnapshot* frozen = nullptr,
                                      CollectStats* stats = nullptr);

// Per-trajectory advantages. Learner roles (both in shared self-play) feed
// the baselines in batch order, role 0 before role 1; with RAE disabled the
// advantage is the raw return and `baselines` is untouched.
std::vector<RoleAdvantages> batch_advantages(std::span<const Trajectory> batch,
                                             BaselineTable& baselines, bool rae_enabled);

struct StepRecord {
  int step = 0;
  int trajectories = 0;
  bool aborted = false;  // non-finite gradient, update skipped
  double grad_norm = 0.0;
  bool clipped = false;
  double ratio_clip_fraction = 0.0;
  double entropy = 0.0;
  double mean_game_length = 0.0;
  double invalid_move_rate = 0.0;
  double mean_return_p0 = 0.0;
  int optimizer_steps = 0;
  std::map<std::pair<GameId, Role>, double> baseline;
  std::map<std::pair<GameId, Role>, double> mean_advantage;
  // Columns filled on evaluation steps only, keyed by column name.
  std::map<std::string, double> eval;
};

struct TrainOptions {
  std::filesystem::path out_dir;  // empty: keep everything in memory
  bool resume = true;             // continue from the latest checkpoint in out_dir
  bool quiet = false;
  std::ostream* log = nullptr;  // progress lines, in addition to run.log
  const std::atomic<bool>* stop = nullptr;
  // Called after every step, for tests and drivers.
  std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
  int final_step = 0;
  bool aborted = false;  // kMaxNonFiniteStreak consecutive bad steps
  bool stopped = false;  // stop flag observed
  Checkpoint checkpoint;
  std::vector<StepRecord> records;  // steps run by this call
};

class Trainer {
 public:
  Trainer(RunConfig config, TrainOptions options);

  int step() const { return step_; }
  const RunConfig& config() const { return config_; }
  const PolicyParams& policy() const { return params_; }
  const BaselineTable& baselines() const { return baselines_; }
  const OptimizerState& optimizer() const { return optimizer_; }
  Checkpoint checkpoint() const;

  // One training step. A non-finite gradient skips the update and extends
  // the abort streak; see aborted().
  StepRecord run_step();
  bool aborted() const { return nonfinite_streak_ >= kMaxNonFiniteStreak; }

  // Steps until total_steps, the stop flag or an abort.
  TrainResult run();

  // Column names of metrics.csv for this config.
  std::vector<std::string> metrics_columns() const;
  std::string metrics_row(const StepRecord& record) const;

 private:
  void resume_from(const Checkpoint& ckpt);
  const PolicySnapshot* lag_snapshot(int before_step, int lag);
  void evaluate(StepRecord& record);
  void persist(const StepRecord& record, double collect_s, double learn_s, double eval_s,
               const std::vector<Trajectory>& batch);
  void save(int step);
  void log_line(const std::string& line);

  RunConfig config_;
  TrainOptions options_;
  PolicyParams params_;
  BaselineTable baselines_;
  OptimizerState optimizer_;
  int step_ = 0;
  int nonfinite_streak_ = 0;
  std::map<int, PolicySnapshot> history_;  // cadence snapshots for lag opponents
  std::optional<PolicySnapshot> fixed_opponent_;
  int history_cadence_ = 16;
};

// Convenience wrapper: Trainer(config, options).run().
TrainResult train(const RunConfig& config, const TrainOptions& options = {});

}  // namespace selfplay

#endif  // SELFPLAY_RUNTIME_HPP_
