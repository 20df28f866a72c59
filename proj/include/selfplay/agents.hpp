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

#ifndef SELFPLAY_AGENTS_HPP_
#define SELFPLAY_AGENTS_HPP_

// Move sources that can occupy a seat: the learning policy, a frozen policy,
// a uniform-random legal player or a scripted heuristic. All are immutable
// and take their randomness from the caller's stream, so one agent object
// can serve any number of concurrent games.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "selfplay/env.hpp"
#include "selfplay/policy.hpp"
#include "selfplay/rng.hpp"
#include "selfplay/trajectory.hpp"

namespace selfplay {

struct Decision {
  int action = 0;
  bool policy_turn = false;
  double logprob = kOpponentLogprob;
  double entropy = 0.0;
  std::string obs_key;
  double temperature = 1.0;
  MaskMode mask_mode = MaskMode::kFullAlphabet;
  std::vector<int> legal_set;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual Decision act(const GameState& state, ChanceStream& rng) const = 0;

  // Exact move distribution over the full alphabet at `state`.
  virtual std::vector<double> action_probs(const GameState& state) const = 0;

  virtual std::string name() const = 0;
};

struct PolicyAgentOptions {
  double temperature = 1.0;
  MaskMode mask = MaskMode::kFullAlphabet;
  bool greedy = false;
  // Marks decisions as learner turns (logprob, entropy and key recorded).
  bool record = true;
};

class PolicyAgent final : public Agent {
 public:
  PolicyAgent(PolicySnapshot snapshot, PolicyAgentOptions options,
              std::string label = "policy");

  Decision act(const GameState& state, ChanceStream& rng) const override;
  std::vector<double> action_probs(const GameState& state) const override;
  std::string name() const override { return label_; }

  const PolicySnapshot& snapshot() const { return snapshot_; }

 private:
  ActionMask mask_for(const GameState& state) const;

  PolicySnapshot snapshot_;
  PolicyAgentOptions options_;
  std::string label_;
};

// Uniform over legal actions; never forfeits.
class UniformRandomAgent final : public Agent {
 public:
  Decision act(const GameState& state, ChanceStream& rng) const override;
  std::vector<double> action_probs(const GameState& state) const override;
  std::string name() const override { return "random"; }
};

// Documented heuristics, by (game, name):
//   TicTacToe    "win-block-else-random", "minimax"
//   ConnectFour  "win-block-else-random"
//   KuhnPoker    "nash" (one-parameter equilibrium family, alpha = 1/6)
//   PigDice      "hold-at-20"
//   SimpleNegotiation "fair-trade"
//   LiarsDice    "count-based"
//   FixedHorizon "first-legal"
// Unknown pairs throw kUnknownScript.
class ScriptedAgent final : public Agent {
 public:
  ScriptedAgent(GameId game, std::string script);

  Decision act(const GameState& state, ChanceStream& rng) const override;
  std::vector<double> action_probs(const GameState& state) const override;
  std::string name() const override { return script_; }

 private:
  GameId game_;
  std::string script_;
};

std::vector<std::string> scripts_for(GameId game);

// Equilibrium behaviour of the Kuhn family parameterised by alpha in
// [0, 1/3], from the view of the player on move in the current round.
std::array<double, 4> kuhn_nash_probs(Card card, std::span<const KuhnMove> history,
                                      double alpha);

enum class OpponentKind { kSelfPlayShared, kUniformRandomLegal, kScripted, kFrozenCheckpoint };

std::string_view opponent_kind_name(OpponentKind kind);
std::optional<OpponentKind> parse_opponent_kind(std::string_view name);

struct OpponentSpec {
  OpponentKind kind = OpponentKind::kSelfPlayShared;
  std::string script;  // kScripted
  std::string path;    // kFrozenCheckpoint: fixed checkpoint file, optional
  int lag_steps = 16;  // kFrozenCheckpoint without path: lag behind training
  bool greedy = false;  // frozen policy: argmax instead of sampling
};

// One opponent move. kFrozenCheckpoint requires `frozen`; kSelfPlayShared
// has no standalone opponent and throws kConfig.
ActionToken opponent_action(const OpponentSpec& spec, const GameState& state,
                            ChanceStream& rng,
                            const PolicySnapshot* frozen = nullptr);

std::unique_ptr<Agent> make_opponent(const OpponentSpec& spec, GameId game,
                                     const PolicySnapshot* frozen,
                                     double temperature, MaskMode mask);

// Plays one game to the end. Seat p draws from its own stream derived from
// `seed`; chance events come from the game's own stream.
Trajectory play_game(GameId game, const GameOptions& options, std::uint64_t seed,
                     const std::array<const Agent*, 2>& seats);

}  // namespace selfplay

#endif  // SELFPLAY_AGENTS_HPP_
