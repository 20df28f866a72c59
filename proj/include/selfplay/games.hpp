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

#ifndef SELFPLAY_GAMES_HPP_
#define SELFPLAY_GAMES_HPP_

// Rule-level helpers of the concrete games. The env-core functions in env.hpp
// are built on these; oracles and scripted opponents use them directly.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfplay/env.hpp"

namespace selfplay {

enum class LineWinner { kPlayer0, kPlayer1, kDraw, kOngoing };

// Throws kIllegalPosition when both marks own a line.
LineWinner tictactoe_winner(const std::array<Mark, 9>& cells);

// Throws kIllegalPosition when both colours own a line of four.
LineWinner connect_four_winner(const ConnectFourState& state);

// --- Kuhn poker -------------------------------------------------------------

bool kuhn_round_over(std::span<const KuhnMove> history);

// Chip delta of a finished betting round from player 0's perspective. Antes
// are 1 each, a bet or call adds 1; a fold forfeits what the folder put in;
// a showdown pays the higher card. `first_actor` is the role that opened
// the round. Throws kNonTerminalHistory for unfinished or malformed rounds.
int kuhn_round_settle(const std::array<Card, 2>& cards,
                      std::span<const KuhnMove> history,
                      Role first_actor = Role::kPlayer0);

// Initial state of a Kuhn match with a fixed first-round deal; the rest of
// the match still draws from the seeded stream.
GameState kuhn_state_with_deal(const std::array<Card, 2>& cards,
                               const GameOptions& options,
                               std::uint64_t seed = 0);

char card_letter(Card card);

// --- Simple negotiation -----------------------------------------------------

inline constexpr int kNegotiationStartStock = 10;
inline constexpr int kNegotiationMaxOfferUnits = 5;
inline constexpr int kNegotiationOfferCount = 6 * 6 * 6 * 6;
inline constexpr int kNegotiationAccept = kNegotiationOfferCount;
inline constexpr int kNegotiationDeny = kNegotiationOfferCount + 1;
inline constexpr std::array<Resources, 2> kNegotiationValuations = {
    Resources{5, 10}, Resources{10, 5}};

int encode_offer(int give_wood, int give_gold, int take_wood, int take_gold);
TradeOffer decode_offer(int action_index, Role proposer);

// Portfolio value of `stock` under `valuation`.
int portfolio_value(const Resources& stock, const Resources& valuation);

// rho = sign(gain_0 - gain_1), where gain_i is the change of player i's
// portfolio under its own valuation.
int negotiation_settle(const std::array<Resources, 2>& initial,
                       const std::array<Resources, 2>& final_inventories,
                       const std::array<Resources, 2>& valuations);

// --- Pig ----------------------------------------------------------------------

enum class PigAction { kRoll = 0, kHold = 1 };

struct PigStep {
  PigState state;
  std::optional<Role> winner;
};

// `face` is consumed only by a roll. A 1 wipes the actor's running total; any
// other face adds to it; hold banks the running total. Reaching the target
// on a hold wins.
PigStep pig_apply(const PigState& state, Role actor, PigAction action, int face);

// --- Liar's dice ----------------------------------------------------------------

inline constexpr int kLiarsDicePerPlayer = 5;
inline constexpr int kLiarsMaxQuantity = 2 * kLiarsDicePerPlayer;
inline constexpr int kLiarsClaimCount = kLiarsMaxQuantity * 6;
inline constexpr int kLiarsChallenge = kLiarsClaimCount;

// Claims are totally ordered quantity-major, face-minor.
int liars_claim_index(int quantity, int face);
DiceClaim liars_claim_from_index(int index, Role claimant);
bool liars_claim_supported(const LiarsDiceState& state, const DiceClaim& claim);

// --- Connect four -------------------------------------------------------------

inline constexpr int kConnectFourRows = 6;
inline constexpr int kConnectFourCols = 7;

}  // namespace selfplay

namespace selfplay::detail {

// Per-game rule set behind the env-core functions. Implementations are
// stateless singletons.
class GameRules {
 public:
  virtual ~GameRules() = default;

  virtual std::span<const std::string> alphabet() const = 0;
  virtual int turn_limit(const GameOptions& options) const = 0;
  virtual GamePayload initial(const GameOptions& options,
                              ChanceStream& chance) const = 0;
  virtual std::vector<int> legal(const GameState& state) const = 0;
  virtual bool is_legal(const GameState& state, int action) const;

  // Applies a legal action by the role on move. `next` is a copy of the
  // current state with the turn counter not yet advanced; implementations
  // set terminal/result when the game ends naturally.
  virtual void advance(GameState& next, int action) const = 0;

  // Result when the turn limit cuts the game off. Default is a draw.
  virtual int turn_limit_rho(const GameState& state) const;

  virtual std::string observation(const GameState& state, Role role) const = 0;
  virtual std::string describe(const GameState& state) const = 0;
};

const GameRules& rules_for(GameId game);

const GameRules& tictactoe_rules();
const GameRules& kuhn_rules();
const GameRules& negotiation_rules();
const GameRules& pig_rules();
const GameRules& liars_dice_rules();
const GameRules& connect_four_rules();
const GameRules& fixed_horizon_rules();

inline void finish(GameState& state, int rho, Reason reason) {
  state.terminal = true;
  state.result = Outcome{rho, reason};
}

inline int sign(int x) { return (x > 0) - (x < 0); }

}  // namespace selfplay::detail

#endif  // SELFPLAY_GAMES_HPP_
