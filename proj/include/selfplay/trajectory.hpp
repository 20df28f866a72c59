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

#ifndef SELFPLAY_TRAJECTORY_HPP_
#define SELFPLAY_TRAJECTORY_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfplay/env.hpp"
#include "selfplay/policy.hpp"

namespace selfplay {

// Logprob carried by turns that the learning policy did not produce.
inline constexpr double kOpponentLogprob = std::numeric_limits<double>::quiet_NaN();

struct TurnRecord {
  int t = 0;
  Role role = Role::kPlayer0;
  std::string obs_key;  // canonical ObservationKey
  int action = 0;
  bool legal = true;
  bool policy_turn = true;  // produced by the learning policy
  double logprob = kOpponentLogprob;
  double entropy = 0.0;
  double temperature = 1.0;
  MaskMode mask_mode = MaskMode::kFullAlphabet;
  std::vector<int> legal_set;  // filled when mask_mode is kLegalOnly
  std::string annotation;      // free-text reasoning slot; unused by tabular play

  ActionMask mask() const {
    return mask_mode == MaskMode::kFullAlphabet ? ActionMask::full()
                                                : ActionMask::legal_only(legal_set);
  }
};

struct Trajectory {
  GameId game = GameId::kTicTacToe;
  GameOptions options;
  std::uint64_t seed = 0;
  std::vector<TurnRecord> turns;
  std::array<int, 2> returns{};  // (R_0, R_1), R_1 = -R_0
  Reason reason = Reason::kNaturalEnd;
  // Role played by the learning policy against a fixed opponent; empty for
  // shared self-play where both roles are the policy.
  std::optional<Role> learner_role;

  int rho() const { return returns[0]; }
};

// Only the options that affect the given game are written.
nlohmann::json options_to_json(GameId game, const GameOptions& options);
GameOptions options_from_json(GameId game, const nlohmann::json& doc);

// Stable JSONL record:
// {game, seed, options, turns: [{t, role, obs_key, action, legal, logprob,
//  policy, temperature, mask}], rho, reason, learner_role}. `action` is the
// alphabet symbol; `logprob` is null on opponent turns; temperature and mask
// appear on policy turns only. Legal sets are not stored: replay rebuilds
// them from the re-simulated state.
nlohmann::json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& doc);

std::string to_jsonl(std::span<const Trajectory> trajectories);
void write_jsonl(const std::filesystem::path& path,
                 std::span<const Trajectory> trajectories);
std::vector<Trajectory> read_jsonl(const std::filesystem::path& path);

}  // namespace selfplay

#endif  // SELFPLAY_TRAJECTORY_HPP_
