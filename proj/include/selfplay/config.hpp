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

#ifndef SELFPLAY_CONFIG_HPP_
#define SELFPLAY_CONFIG_HPP_

// Run configuration: TOML in, TOML out. Unknown keys and ill-typed values
// are rejected with the dotted key path in the message (ErrorKind::kConfig).

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfplay/agents.hpp"
#include "selfplay/env.hpp"
#include "selfplay/learner.hpp"
#include "selfplay/policy.hpp"

namespace selfplay {

struct WeightedGame {
  GameId game = GameId::kKuhnPoker;
  double weight = 1.0;
  friend bool operator==(const WeightedGame&, const WeightedGame&) = default;
};

// Learning rate the published large-model runs used; tabular runs default to
// a larger rate and record this one next to it in emitted configs.
inline constexpr double kPublishedLearningRate = 1e-6;

struct RunConfig {
  std::uint64_t seed = 0;
  int total_steps = 400;
  int batch_size = 128;
  int actors = 1;
  double temperature = 1.0;
  MaskMode mask = MaskMode::kFullAlphabet;
  int max_env_retries = 3;

  std::vector<WeightedGame> games = {{GameId::kKuhnPoker, 1.0}};  // sorted by id
  GameOptions game_options;

  bool rae_enabled = true;
  double rae_alpha = 0.95;

  LearnerConfig learner;

  OpponentSpec opponent;

  int eval_every = 16;
  int eval_games = 256;
  bool eval_greedy = true;
  double eval_temperature = 1.0;
  int eval_lag_steps = 16;

  int checkpoint_every = 16;
  int trajectory_log_every = 0;  // 0 disables trajectory logging
};

// Parses TOML text, applies "dotted.key=value" overrides in order, validates.
RunConfig parse_config(std::string_view toml_text,
                       std::span<const std::string> overrides = {});
RunConfig load_config(const std::string& path,
                      std::span<const std::string> overrides = {});

// Canonical TOML for a resolved config; parse_config(render_config(c)) == c.
std::string render_config(const RunConfig& config);

// Identity of the training trajectory a config produces: excludes
// total_steps, actors and log.trajectory_every, which never change results
// up to a given step.
std::uint64_t config_hash(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace selfplay

#endif  // SELFPLAY_CONFIG_HPP_
