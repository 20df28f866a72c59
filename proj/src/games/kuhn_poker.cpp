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

#include <string>
#include <vector>

#include "selfplay/error.hpp"
#include "selfplay/games.hpp"

namespace selfplay {

namespace {

constexpr std::string_view kMoveNames[4] = {"check", "bet", "call", "fold"};

std::array<Card, 2> deal(ChanceStream& chance) {
  const int first = chance.uniform_int(3);
  const int second = (first + 1 + chance.uniform_int(2)) % 3;
  return {static_cast<Card>(first), static_cast<Card>(second)};
}

bool facing_bet(const std::vector<KuhnMove>& history) {
  return !history.empty() && history.back() == KuhnMove::kBet;
}

class KuhnRules final : public detail::GameRules {
 public:
  KuhnRules() {
    for (auto n : kMoveNames) names_.emplace_back(n);
  }

  std::span<const std::string> alphabet() const override { return names_; }

  int turn_limit(const GameOptions& options) const override {
    return 4 * options.kuhn_rounds;
  }

  GamePayload initial(const GameOptions& options,
                      ChanceStream& chance) const override {
    if (options.kuhn_rounds < 1) {
      throw Error(ErrorKind::kConfig, "kuhn_rounds must be >= 1");
    }
    KuhnState s;
    s.rounds_total = options.kuhn_rounds;
    s.cards = deal(chance);
    s.key_round = options.kuhn_key_round;
    s.key_chip_bucket = options.kuhn_key_chip_bucket;
    return s;
  }

  std::vector<int> legal(const GameState& state) const override {
    const auto& s = std::get<KuhnState>(state.payload);
    if (facing_bet(s.history)) {
      return {static_cast<int>(KuhnMove::kCall), static_cast<int>(KuhnMove::kFold)};
    }
    return {static_cast<int>(KuhnMove::kCheck), static_cast<int>(KuhnMove::kBet)};
  }

  bool is_legal(const GameState& state, int action) const override {
    const bool bet_pending = facing_bet(std::get<KuhnState>(state.payload).history);
    const auto move = static_cast<KuhnMove>(action);
    if (bet_pending) return move == KuhnMove::kCall || move == KuhnMove::kFold;
    return move == KuhnMove::kCheck || move == KuhnMove::kBet;
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<KuhnState>(next.payload);
    s.history.push_back(static_cast<KuhnMove>(action));
    if (!kuhn_round_over(s.history)) return;
    const int delta = kuhn_round_settle(s.cards, s.history, s.round_first_actor);
    s.round_deltas.push_back(delta);
    s.chip_delta += delta;
    s.round_index += 1;
    s.history.clear();
    if (s.round_index == s.rounds_total) {
      detail::finish(next, detail::sign(s.chip_delta), Reason::kNaturalEnd);
      return;
    }
    // Deal order: player 0's card, then player 1's, once per round.
    s.cards = deal(next.chance);
    s.round_first_actor = role_at_turn(next.turn + 1);
  }

  int turn_limit_rho(const GameState& state) const override {
    return detail::sign(std::get<KuhnState>(state.payload).chip_delta);
  }

  // Key: "<own card>[|r=<round>][|c=<own chip sign>]|h=<round history>",
  // e.g. "K|h=check,bet". The opponent's card never appears.
  std::string observation(const GameState& state, Role role) const override {
    const auto& s = std::get<KuhnState>(state.payload);
    std::string out(1, card_letter(s.cards[index(role)]));
    if (s.key_round) out += "|r=" + std::to_string(s.round_index);
    if (s.key_chip_bucket) {
      const int own = role == Role::kPlayer0 ? s.chip_delta : -s.chip_delta;
      out += "|c=";
      out += own > 0 ? '+' : (own < 0 ? '-' : '0');
    }
    out += "|h=";
    for (std::size_t i = 0; i < s.history.size(); ++i) {
      if (i) out += ',';
      out += kMoveNames[static_cast<int>(s.history[i])];
    }
    return out;
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<KuhnState>(state.payload);
    std::string out = "round " + std::to_string(s.round_index) + "/" +
                      std::to_string(s.rounds_total) + " cards " +
                      card_letter(s.cards[0]) + card_letter(s.cards[1]) +
                      " chips " + std::to_string(s.chip_delta) + " h=";
    for (std::size_t i = 0; i < s.history.size(); ++i) {
      if (i) out += ',';
      out += kMoveNames[static_cast<int>(s.history[i])];
    }
    return out;
  }

 private:
  std::vector<std::string> names_;
};

}  // namespace

char card_letter(Card card) {
  switch (card) {
    case Card::kJack: return 'J';
    case Card::kQueen: return 'Q';
    case Card::kKing: return 'K';
  }
  return '?';
}

bool kuhn_round_over(std::span<const KuhnMove> h) {
  using M = KuhnMove;
  if (h.size() == 2) {
    return (h[0] == M::kCheck && h[1] == M::kCheck) ||
           (h[0] == M::kBet && (h[1] == M::kCall || h[1] == M::kFold));
  }
  if (h.size() == 3) {
    return h[0] == M::kCheck && h[1] == M::kBet &&
           (h[2] == M::kCall || h[2] == M::kFold);
  }
  return false;
}

int kuhn_round_settle(const std::array<Card, 2>& cards,
                      std::span<const KuhnMove> history, Role first_actor) {
  if (!kuhn_round_over(history)) {
    throw Error(ErrorKind::kNonTerminalHistory,
                "betting history of length " + std::to_string(history.size()) +
                    " does not end a round");
  }
  if (cards[0] == cards[1]) {
    throw Error(ErrorKind::kNonTerminalHistory, "players hold the same card");
  }
  std::array<int, 2> put_in = {1, 1};
  Role actor = first_actor;
  std::optional<Role> folder;
  for (KuhnMove m : history) {
    if (m == KuhnMove::kBet || m == KuhnMove::kCall) put_in[index(actor)] += 1;
    if (m == KuhnMove::kFold) folder = actor;
    actor = opponent(actor);
  }
  Role winner;
  if (folder) {
    winner = opponent(*folder);
  } else {
    winner = cards[0] > cards[1] ? Role::kPlayer0 : Role::kPlayer1;
  }
  return winner == Role::kPlayer0 ? put_in[1] : -put_in[0];
}

GameState kuhn_state_with_deal(const std::array<Card, 2>& cards,
                               const GameOptions& options, std::uint64_t seed) {
  if (cards[0] == cards[1]) {
    throw Error(ErrorKind::kIllegalPosition, "duplicate card in deal");
  }
  GameState state = reset(GameId::kKuhnPoker, seed, options);
  std::get<KuhnState>(state.payload).cards = cards;
  return state;
}

namespace detail {
const GameRules& kuhn_rules() {
  static const KuhnRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
