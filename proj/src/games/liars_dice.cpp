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

#include <algorithm>
#include <string>
#include <vector>

#include "selfplay/error.hpp"
#include "selfplay/games.hpp"

namespace selfplay {

namespace {

constexpr int kLiarsTurns = 60;

std::string claim_text(int quantity, int face) {
  return std::to_string(quantity) + "x" + std::to_string(face);
}

class LiarsDiceRules final : public detail::GameRules {
 public:
  LiarsDiceRules() {
    for (int i = 0; i < kLiarsClaimCount; ++i) {
      const DiceClaim c = liars_claim_from_index(i, Role::kPlayer0);
      names_.push_back("claim:" + claim_text(c.quantity, c.face));
    }
    names_.emplace_back("challenge");
  }

  std::span<const std::string> alphabet() const override { return names_; }
  int turn_limit(const GameOptions&) const override { return kLiarsTurns; }

  // Chance order: player 0's five dice, then player 1's.
  GamePayload initial(const GameOptions&, ChanceStream& chance) const override {
    LiarsDiceState s;
    for (auto& hand : s.dice) {
      for (int& d : hand) d = chance.die();
      std::sort(hand.begin(), hand.end());
    }
    return s;
  }

  std::vector<int> legal(const GameState& state) const override {
    const auto& s = std::get<LiarsDiceState>(state.payload);
    std::vector<int> out;
    const int first = s.current_claim
                          ? liars_claim_index(s.current_claim->quantity,
                                              s.current_claim->face) + 1
                          : 0;
    for (int i = first; i < kLiarsClaimCount; ++i) out.push_back(i);
    if (s.current_claim) out.push_back(kLiarsChallenge);
    return out;
  }

  bool is_legal(const GameState& state, int action) const override {
    const auto& s = std::get<LiarsDiceState>(state.payload);
    if (action == kLiarsChallenge) return s.current_claim.has_value();
    if (!s.current_claim) return true;
    return action > liars_claim_index(s.current_claim->quantity,
                                      s.current_claim->face);
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<LiarsDiceState>(next.payload);
    const Role actor = role_at_turn(next.turn);
    if (action == kLiarsChallenge) {
      const DiceClaim claim = *s.current_claim;
      const Role winner =
          liars_claim_supported(s, claim) ? claim.claimant : actor;
      s.resolved = true;
      detail::finish(next, winner == Role::kPlayer0 ? +1 : -1,
                     Reason::kNaturalEnd);
      return;
    }
    s.current_claim = liars_claim_from_index(action, actor);
  }

  // Key: "d=<own dice sorted>|c=<quantity>x<face> or ->". Only the standing
  // claim is public state that matters for legality and payoff.
  std::string observation(const GameState& state, Role role) const override {
    const auto& s = std::get<LiarsDiceState>(state.payload);
    std::string out = "d=";
    for (int d : s.dice[index(role)]) out += static_cast<char>('0' + d);
    out += "|c=";
    out += s.current_claim
               ? claim_text(s.current_claim->quantity, s.current_claim->face)
               : "-";
    return out;
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<LiarsDiceState>(state.payload);
    std::string out = "dice ";
    for (int r = 0; r < 2; ++r) {
      for (int d : s.dice[r]) out += static_cast<char>('0' + d);
      out += r == 0 ? "/" : "";
    }
    out += " claim ";
    out += s.current_claim
               ? claim_text(s.current_claim->quantity, s.current_claim->face)
               : "-";
    return out;
  }

 private:
  std::vector<std::string> names_;
};

}  // namespace

int liars_claim_index(int quantity, int face) {
  if (quantity < 1 || quantity > kLiarsMaxQuantity || face < 1 || face > 6) {
    throw Error(ErrorKind::kAlphabetMismatch, "claim out of range");
  }
  return (quantity - 1) * 6 + (face - 1);
}

DiceClaim liars_claim_from_index(int index, Role claimant) {
  if (index < 0 || index >= kLiarsClaimCount) {
    throw Error(ErrorKind::kAlphabetMismatch, "not a claim token");
  }
  return DiceClaim{index / 6 + 1, index % 6 + 1, claimant};
}

bool liars_claim_supported(const LiarsDiceState& state, const DiceClaim& claim) {
  int count = 0;
  for (const auto& hand : state.dice) {
    count += static_cast<int>(std::count(hand.begin(), hand.end(), claim.face));
  }
  return count >= claim.quantity;
}

namespace detail {
const GameRules& liars_dice_rules() {
  static const LiarsDiceRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
