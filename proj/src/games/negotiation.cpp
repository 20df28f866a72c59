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

constexpr int kNegotiationTurns = 8;

bool offer_feasible(const NegotiationState& s, const TradeOffer& o) {
  const auto& mine = s.inventories[index(o.proposer)];
  const auto& theirs = s.inventories[index(opponent(o.proposer))];
  return o.give_wood <= mine.wood && o.give_gold <= mine.gold &&
         o.take_wood <= theirs.wood && o.take_gold <= theirs.gold;
}

std::string offer_text(const TradeOffer& o) {
  return std::to_string(o.give_wood) + "," + std::to_string(o.give_gold) + "," +
         std::to_string(o.take_wood) + "," + std::to_string(o.take_gold);
}

class NegotiationRules final : public detail::GameRules {
 public:
  NegotiationRules() {
    names_.reserve(kNegotiationOfferCount + 2);
    for (int i = 0; i < kNegotiationOfferCount; ++i) {
      names_.push_back("offer:" + offer_text(decode_offer(i, Role::kPlayer0)));
    }
    names_.emplace_back("accept");
    names_.emplace_back("deny");
  }

  std::span<const std::string> alphabet() const override { return names_; }
  int turn_limit(const GameOptions&) const override { return kNegotiationTurns; }

  GamePayload initial(const GameOptions&, ChanceStream&) const override {
    NegotiationState s;
    const Resources start{kNegotiationStartStock, kNegotiationStartStock};
    s.inventories = {start, start};
    s.initial = s.inventories;
    s.valuations = kNegotiationValuations;
    return s;
  }

  std::vector<int> legal(const GameState& state) const override {
    std::vector<int> out;
    for (int a = 0; a < static_cast<int>(names_.size()); ++a) {
      if (is_legal(state, a)) out.push_back(a);
    }
    return out;
  }

  bool is_legal(const GameState& state, int action) const override {
    const auto& s = std::get<NegotiationState>(state.payload);
    if (action == kNegotiationDeny) return true;
    if (action == kNegotiationAccept) return s.pending_offer.has_value();
    return offer_feasible(s, decode_offer(action, role_at_turn(state.turn)));
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<NegotiationState>(next.payload);
    const Role actor = role_at_turn(next.turn);
    if (action == kNegotiationDeny) {
      s.pending_offer.reset();
      if (++s.consecutive_denies >= 2) {
        detail::finish(next, settle(s), Reason::kNaturalEnd);
      }
      return;
    }
    s.consecutive_denies = 0;
    if (action == kNegotiationAccept) {
      const TradeOffer o = *s.pending_offer;
      auto& proposer = s.inventories[index(o.proposer)];
      auto& acceptor = s.inventories[index(opponent(o.proposer))];
      proposer.wood += o.take_wood - o.give_wood;
      proposer.gold += o.take_gold - o.give_gold;
      acceptor.wood += o.give_wood - o.take_wood;
      acceptor.gold += o.give_gold - o.take_gold;
      s.pending_offer.reset();
      return;
    }
    s.pending_offer = decode_offer(action, actor);
  }

  int turn_limit_rho(const GameState& state) const override {
    return settle(std::get<NegotiationState>(state.payload));
  }

  // Key: "t=<turn>|own=<wood>,<gold>|opp=<wood>,<gold>|o=<offer or ->".
  // Valuations are private but fixed per role, so the role already implies
  // them; the opponent's valuation is never encoded.
  std::string observation(const GameState& state, Role role) const override {
    const auto& s = std::get<NegotiationState>(state.payload);
    const auto& own = s.inventories[index(role)];
    const auto& opp = s.inventories[index(opponent(role))];
    std::string out = "t=" + std::to_string(state.turn) + "|own=" +
                      std::to_string(own.wood) + "," + std::to_string(own.gold) +
                      "|opp=" + std::to_string(opp.wood) + "," +
                      std::to_string(opp.gold) + "|o=";
    out += s.pending_offer ? offer_text(*s.pending_offer) : "-";
    return out;
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<NegotiationState>(state.payload);
    std::string out = "p0=" + std::to_string(s.inventories[0].wood) + "w" +
                      std::to_string(s.inventories[0].gold) + "g p1=" +
                      std::to_string(s.inventories[1].wood) + "w" +
                      std::to_string(s.inventories[1].gold) + "g offer=";
    out += s.pending_offer ? offer_text(*s.pending_offer) : "-";
    return out;
  }

 private:
  static int settle(const NegotiationState& s) {
    return negotiation_settle(s.initial, s.inventories, s.valuations);
  }

  std::vector<std::string> names_;
};

}  // namespace

int encode_offer(int give_wood, int give_gold, int take_wood, int take_gold) {
  for (int v : {give_wood, give_gold, take_wood, take_gold}) {
    if (v < 0 || v > kNegotiationMaxOfferUnits) {
      throw Error(ErrorKind::kAlphabetMismatch, "offer component out of range");
    }
  }
  return ((give_wood * 6 + give_gold) * 6 + take_wood) * 6 + take_gold;
}

TradeOffer decode_offer(int action_index, Role proposer) {
  if (action_index < 0 || action_index >= kNegotiationOfferCount) {
    throw Error(ErrorKind::kAlphabetMismatch, "not an offer token");
  }
  TradeOffer o;
  o.take_gold = action_index % 6;
  o.take_wood = (action_index / 6) % 6;
  o.give_gold = (action_index / 36) % 6;
  o.give_wood = action_index / 216;
  o.proposer = proposer;
  return o;
}

int portfolio_value(const Resources& stock, const Resources& valuation) {
  return stock.wood * valuation.wood + stock.gold * valuation.gold;
}

int negotiation_settle(const std::array<Resources, 2>& initial,
                       const std::array<Resources, 2>& final_inventories,
                       const std::array<Resources, 2>& valuations) {
  const int gain0 = portfolio_value(final_inventories[0], valuations[0]) -
                    portfolio_value(initial[0], valuations[0]);
  const int gain1 = portfolio_value(final_inventories[1], valuations[1]) -
                    portfolio_value(initial[1], valuations[1]);
  return detail::sign(gain0 - gain1);
}

namespace detail {
const GameRules& negotiation_rules() {
  static const NegotiationRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
