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

#ifndef SELFPLAY_ENV_HPP_
#define SELFPLAY_ENV_HPP_

// Turn-level two-player zero-sum Markov game contract.
//
// Every game is driven through the same free functions: reset, legal_actions,
// apply, active_role, observe, outcome. States are values: apply copies and
// returns the successor, so a GameState can be shared across threads freely.
// Role p acts at turn t iff p == t mod 2, for every game.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "selfplay/rng.hpp"

namespace selfplay {

enum class GameId : std::uint8_t {
  kTicTacToe = 0,
  kKuhnPoker,
  kSimpleNegotiation,
  kPigDice,
  kLiarsDice,
  kConnectFour,
  // Diagnostic game with a fixed number of turns and a configurable legal
  // subset; exercises invalid-move dynamics and gradient checks.
  kFixedHorizon,
};

inline constexpr std::array<GameId, 7> kAllGames = {
    GameId::kTicTacToe, GameId::kKuhnPoker,  GameId::kSimpleNegotiation,
    GameId::kPigDice,   GameId::kLiarsDice,  GameId::kConnectFour,
    GameId::kFixedHorizon};

std::string_view game_name(GameId game);
std::optional<GameId> parse_game(std::string_view name);

enum class Role : std::uint8_t { kPlayer0 = 0, kPlayer1 = 1 };

constexpr int index(Role role) { return static_cast<int>(role); }
constexpr Role opponent(Role role) {
  return role == Role::kPlayer0 ? Role::kPlayer1 : Role::kPlayer0;
}
constexpr Role role_at_turn(int turn) {
  return (turn % 2 == 0) ? Role::kPlayer0 : Role::kPlayer1;
}

struct ActionToken {
  GameId game = GameId::kTicTacToe;
  int index = 0;  // position in the game's full alphabet

  friend bool operator==(const ActionToken&, const ActionToken&) = default;
};

enum class Reason : std::uint8_t { kNaturalEnd, kInvalidMoveForfeit, kTurnLimit };

std::string_view reason_name(Reason reason);
std::optional<Reason> parse_reason(std::string_view name);

struct Outcome {
  int rho = 0;  // player 0's result in {-1, 0, +1}
  Reason reason = Reason::kNaturalEnd;

  int reward(Role role) const { return role == Role::kPlayer0 ? rho : -rho; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Canonical information-set key of the acting player. `key` is the
// game-specific part; canonical() prefixes game and role so that the same
// board seen by different roles never shares a policy entry.
struct ObservationKey {
  GameId game = GameId::kTicTacToe;
  Role role = Role::kPlayer0;
  std::string key;

  std::string canonical() const;
  friend bool operator==(const ObservationKey&, const ObservationKey&) = default;
};

// Inverse of ObservationKey::canonical().
std::optional<ObservationKey> parse_observation_key(std::string_view text);

inline constexpr int kKeyGrammarVersion = 1;

// Per-game rule parameters. Only the fields of the selected game matter.
struct GameOptions {
  int kuhn_rounds = 5;
  bool kuhn_key_round = false;        // add "r=<round>" to the Kuhn key
  bool kuhn_key_chip_bucket = false;  // add "c=<-|0|+>" to the Kuhn key
  int pig_target = 100;
  int horizon_length = 4;  // FixedHorizon: number of turns
  int horizon_legal = 1;   // FixedHorizon: legal prefix of the alphabet

  friend bool operator==(const GameOptions&, const GameOptions&) = default;
};

// ---------------------------------------------------------------------------
// Game payloads.

enum class Mark : std::uint8_t { kEmpty = 0, kX = 1, kO = 2 };

struct TicTacToeState {
  std::array<Mark, 9> cells{};
  friend bool operator==(const TicTacToeState&, const TicTacToeState&) = default;
};

enum class Card : std::uint8_t { kJack = 0, kQueen = 1, kKing = 2 };
enum class KuhnMove : std::uint8_t { kCheck = 0, kBet = 1, kCall = 2, kFold = 3 };

struct KuhnState {
  int round_index = 0;
  int rounds_total = 5;
  std::array<Card, 2> cards{};  // indexed by role
  std::vector<KuhnMove> history;  // current round only
  int chip_delta = 0;             // player 0 perspective
  Role round_first_actor = Role::kPlayer0;
  std::vector<int> round_deltas;  // settled rounds, player 0 perspective
  bool key_round = false;
  bool key_chip_bucket = false;
  friend bool operator==(const KuhnState&, const KuhnState&) = default;
};

struct Resources {
  int wood = 0;
  int gold = 0;
  friend bool operator==(const Resources&, const Resources&) = default;
};

struct TradeOffer {
  int give_wood = 0;
  int give_gold = 0;
  int take_wood = 0;
  int take_gold = 0;
  Role proposer = Role::kPlayer0;
  friend bool operator==(const TradeOffer&, const TradeOffer&) = default;
};

struct NegotiationState {
  std::array<Resources, 2> inventories{};
  std::array<Resources, 2> initial{};
  std::array<Resources, 2> valuations{};  // points per unit, per role
  std::optional<TradeOffer> pending_offer;
  int consecutive_denies = 0;
  friend bool operator==(const NegotiationState&, const NegotiationState&) = default;
};

struct PigState {
  std::array<int, 2> banked{};
  // Unbanked points of each player. Players alternate single decisions, so
  // each keeps a running total until it holds or rolls a 1.
  std::array<int, 2> turn_total{};
  int target = 100;
  friend bool operator==(const PigState&, const PigState&) = default;
};

struct DiceClaim {
  int quantity = 0;
  int face = 0;
  Role claimant = Role::kPlayer0;
  friend bool operator==(const DiceClaim&, const DiceClaim&) = default;
};

struct LiarsDiceState {
  std::array<std::array<int, 5>, 2> dice{};  // sorted ascending per role
  std::optional<DiceClaim> current_claim;
  bool resolved = false;
  friend bool operator==(const LiarsDiceState&, const LiarsDiceState&) = default;
};

struct ConnectFourState {
  // grid[row][col], row 0 is the bottom.
  std::array<std::array<Mark, 7>, 6> grid{};
  friend bool operator==(const ConnectFourState&, const ConnectFourState&) = default;
};

struct FixedHorizonState {
  int length = 4;
  int legal_count = 1;
  int action_sum = 0;
  friend bool operator==(const FixedHorizonState&, const FixedHorizonState&) = default;
};

using GamePayload =
    std::variant<TicTacToeState, KuhnState, NegotiationState, PigState,
                 LiarsDiceState, ConnectFourState, FixedHorizonState>;

// Full Markov state of one match. Treated as immutable once returned by
// reset/apply; chance events draw from `chance`, which is part of the value.
struct GameState {
  GameId game = GameId::kTicTacToe;
  std::uint64_t seed = 0;
  int turn = 0;
  int turn_limit = 0;
  bool terminal = false;
  Outcome result;  // meaningful only when terminal
  ChanceStream chance;
  GamePayload payload;

  friend bool operator==(const GameState&, const GameState&) = default;
};

// ---------------------------------------------------------------------------
// Contract.

std::span<const std::string> alphabet(GameId game);
std::string_view action_name(ActionToken action);
std::optional<ActionToken> parse_action(GameId game, std::string_view name);

int turn_limit(GameId game, const GameOptions& options);

GameState reset(GameId game, std::uint64_t seed, const GameOptions& options = {});

// Throws Error(kTerminalState) on terminal states.
std::vector<ActionToken> legal_actions(const GameState& state);
std::vector<int> legal_action_indices(const GameState& state);
bool is_legal(const GameState& state, int action_index);

// Legal actions advance the game; illegal alphabet tokens forfeit the match
// for the actor. Throws kAlphabetMismatch for a token of another game and
// kTerminalState when the game is over.
GameState apply(const GameState& state, ActionToken action);

Role active_role(const GameState& state);
ObservationKey observe(const GameState& state, Role role);
Outcome outcome(const GameState& state);

// Human-readable one-line rendering, for logs and replay diagnostics.
std::string describe(const GameState& state);

}  // namespace selfplay

#endif  // SELFPLAY_ENV_HPP_
