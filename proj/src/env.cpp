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

#include "selfplay/env.hpp"

#include <algorithm>

#include "selfplay/error.hpp"
#include "selfplay/games.hpp"

namespace selfplay {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTerminalState: return "TerminalState";
    case ErrorKind::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::kInactiveRole: return "InactiveRole";
    case ErrorKind::kNotTerminal: return "NotTerminal";
    case ErrorKind::kIllegalPosition: return "IllegalPosition";
    case ErrorKind::kNonTerminalHistory: return "NonTerminalHistory";
    case ErrorKind::kEmptyLegalSet: return "EmptyLegalSet";
    case ErrorKind::kZeroProbabilityAction: return "ZeroProbabilityAction";
    case ErrorKind::kMissingAdvantage: return "MissingAdvantage";
    case ErrorKind::kSnapshotMismatch: return "SnapshotMismatch";
    case ErrorKind::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::kUnknownScript: return "UnknownScript";
    case ErrorKind::kGameTooLarge: return "GameTooLarge";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kReplayDivergence: return "ReplayDivergence";
    case ErrorKind::kFormat: return "FormatError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

namespace {

constexpr std::array<std::string_view, 7> kGameNames = {
    "TicTacToe", "KuhnPoker",   "SimpleNegotiation", "PigDice",
    "LiarsDice", "ConnectFour", "FixedHorizon"};

void require_live(const GameState& state) {
  if (state.terminal) {
    throw Error(ErrorKind::kTerminalState,
                std::string(game_name(state.game)) + " at turn " +
                    std::to_string(state.turn));
  }
}

}  // namespace

std::string_view game_name(GameId game) {
  return kGameNames[static_cast<std::size_t>(game)];
}

std::optional<GameId> parse_game(std::string_view name) {
  for (GameId game : kAllGames) {
    if (game_name(game) == name) return game;
  }
  return std::nullopt;
}

std::string_view reason_name(Reason reason) {
  switch (reason) {
    case Reason::kNaturalEnd: return "NaturalEnd";
    case Reason::kInvalidMoveForfeit: return "InvalidMoveForfeit";
    case Reason::kTurnLimit: return "TurnLimit";
  }
  return "?";
}

std::optional<Reason> parse_reason(std::string_view name) {
  for (Reason r : {Reason::kNaturalEnd, Reason::kInvalidMoveForfeit,
                   Reason::kTurnLimit}) {
    if (reason_name(r) == name) return r;
  }
  return std::nullopt;
}

std::string ObservationKey::canonical() const {
  std::string out(game_name(game));
  out += ':';
  out += static_cast<char>('0' + index(role));
  out += ':';
  out += key;
  return out;
}

std::optional<ObservationKey> parse_observation_key(std::string_view text) {
  const auto first = text.find(':');
  if (first == std::string_view::npos || text.size() < first + 3 ||
      text[first + 2] != ':') {
    return std::nullopt;
  }
  const auto game = parse_game(text.substr(0, first));
  const char r = text[first + 1];
  if (!game || (r != '0' && r != '1')) return std::nullopt;
  return ObservationKey{*game, r == '0' ? Role::kPlayer0 : Role::kPlayer1,
                        std::string(text.substr(first + 3))};
}

std::span<const std::string> alphabet(GameId game) {
  return detail::rules_for(game).alphabet();
}

std::string_view action_name(ActionToken action) {
  const auto names = alphabet(action.game);
  if (action.index < 0 || action.index >= static_cast<int>(names.size())) {
    throw Error(ErrorKind::kAlphabetMismatch,
                "index " + std::to_string(action.index) + " outside " +
                    std::string(game_name(action.game)) + " alphabet");
  }
  return names[static_cast<std::size_t>(action.index)];
}

std::optional<ActionToken> parse_action(GameId game, std::string_view name) {
  const auto names = alphabet(game);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return ActionToken{game, static_cast<int>(it - names.begin())};
}

int turn_limit(GameId game, const GameOptions& options) {
  return detail::rules_for(game).turn_limit(options);
}

GameState reset(GameId game, std::uint64_t seed, const GameOptions& options) {
  const auto& rules = detail::rules_for(game);
  GameState state;
  state.game = game;
  state.seed = seed;
  state.turn = 0;
  state.turn_limit = rules.turn_limit(options);
  state.chance = ChanceStream(derive_seed(seed, 0xC4A2CE));
  state.payload = rules.initial(options, state.chance);
  return state;
}

std::vector<int> legal_action_indices(const GameState& state) {
  require_live(state);
  return detail::rules_for(state.game).legal(state);
}

std::vector<ActionToken> legal_actions(const GameState& state) {
  std::vector<ActionToken> out;
  for (int a : legal_action_indices(state)) out.push_back({state.game, a});
  return out;
}

bool is_legal(const GameState& state, int action_index) {
  require_live(state);
  return detail::rules_for(state.game).is_legal(state, action_index);
}

GameState apply(const GameState& state, ActionToken action) {
  require_live(state);
  const auto& rules = detail::rules_for(state.game);
  if (action.game != state.game || action.index < 0 ||
      action.index >= static_cast<int>(rules.alphabet().size())) {
    throw Error(ErrorKind::kAlphabetMismatch,
                std::string(game_name(action.game)) + " token applied to " +
                    std::string(game_name(state.game)));
  }
  GameState next = state;
  const Role actor = role_at_turn(state.turn);
  if (!rules.is_legal(state, action.index)) {
    next.turn += 1;
    detail::finish(next, actor == Role::kPlayer0 ? -1 : +1,
                   Reason::kInvalidMoveForfeit);
    return next;
  }
  rules.advance(next, action.index);
  next.turn += 1;
  if (!next.terminal && next.turn >= next.turn_limit) {
    detail::finish(next, rules.turn_limit_rho(next), Reason::kTurnLimit);
  }
  return next;
}

Role active_role(const GameState& state) {
  require_live(state);
  return role_at_turn(state.turn);
}

ObservationKey observe(const GameState& state, Role role) {
  require_live(state);
  if (role != role_at_turn(state.turn)) {
    throw Error(ErrorKind::kInactiveRole,
                "role " + std::to_string(index(role)) + " at turn " +
                    std::to_string(state.turn));
  }
  return ObservationKey{state.game, role,
                        detail::rules_for(state.game).observation(state, role)};
}

Outcome outcome(const GameState& state) {
  if (!state.terminal) {
    throw Error(ErrorKind::kNotTerminal,
                std::string(game_name(state.game)) + " at turn " +
                    std::to_string(state.turn));
  }
  return state.result;
}

std::string describe(const GameState& state) {
  std::string out = std::string(game_name(state.game)) + " t=" +
                    std::to_string(state.turn) + " " +
                    detail::rules_for(state.game).describe(state);
  if (state.terminal) {
    out += " [terminal rho=" + std::to_string(state.result.rho) + " " +
           std::string(reason_name(state.result.reason)) + "]";
  }
  return out;
}

namespace detail {

bool GameRules::is_legal(const GameState& state, int action) const {
  const auto moves = legal(state);
  return std::find(moves.begin(), moves.end(), action) != moves.end();
}

int GameRules::turn_limit_rho(const GameState&) const { return 0; }

const GameRules& rules_for(GameId game) {
  switch (game) {
    case GameId::kTicTacToe: return tictactoe_rules();
    case GameId::kKuhnPoker: return kuhn_rules();
    case GameId::kSimpleNegotiation: return negotiation_rules();
    case GameId::kPigDice: return pig_rules();
    case GameId::kLiarsDice: return liars_dice_rules();
    case GameId::kConnectFour: return connect_four_rules();
    case GameId::kFixedHorizon: return fixed_horizon_rules();
  }
  throw Error(ErrorKind::kAlphabetMismatch, "unregistered game id");
}

}  // namespace detail
}  // namespace selfplay
