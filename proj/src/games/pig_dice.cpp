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

constexpr int kPigTurns = 200;

class PigRules final : public detail::GameRules {
 public:
  std::span<const std::string> alphabet() const override { return names_; }
  int turn_limit(const GameOptions&) const override { return kPigTurns; }

  GamePayload initial(const GameOptions& options, ChanceStream&) const override {
    if (options.pig_target < 1) {
      throw Error(ErrorKind::kConfig, "pig_target must be >= 1");
    }
    PigState s;
    s.target = options.pig_target;
    return s;
  }

  std::vector<int> legal(const GameState&) const override { return {0, 1}; }
  bool is_legal(const GameState&, int action) const override {
    return action == 0 || action == 1;
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<PigState>(next.payload);
    const Role actor = role_at_turn(next.turn);
    const auto pig_action = static_cast<PigAction>(action);
    // One die per roll, drawn at the moment of the roll.
    const int face = pig_action == PigAction::kRoll ? next.chance.die() : 0;
    const PigStep step = pig_apply(s, actor, pig_action, face);
    s = step.state;
    if (step.winner) {
      detail::finish(next, *step.winner == Role::kPlayer0 ? +1 : -1,
                     Reason::kNaturalEnd);
    }
  }

  // Key: "b=<own banked>,<opp banked>|t=<own running>,<opp running>".
  std::string observation(const GameState& state, Role role) const override {
    const auto& s = std::get<PigState>(state.payload);
    const int me = index(role);
    const int op = 1 - me;
    return "b=" + std::to_string(s.banked[me]) + "," + std::to_string(s.banked[op]) +
           "|t=" + std::to_string(s.turn_total[me]) + "," +
           std::to_string(s.turn_total[op]);
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<PigState>(state.payload);
    return "banked " + std::to_string(s.banked[0]) + "/" +
           std::to_string(s.banked[1]) + " running " +
           std::to_string(s.turn_total[0]) + "/" + std::to_string(s.turn_total[1]) +
           " target " + std::to_string(s.target);
  }

 private:
  std::vector<std::string> names_ = {"roll", "hold"};
};

}  // namespace

PigStep pig_apply(const PigState& state, Role actor, PigAction action, int face) {
  PigStep step{state, std::nullopt};
  const int me = index(actor);
  if (action == PigAction::kRoll) {
    if (face < 1 || face > 6) {
      throw Error(ErrorKind::kIllegalPosition, "die face out of range");
    }
    if (face == 1) {
      step.state.turn_total[me] = 0;
    } else {
      step.state.turn_total[me] += face;
    }
    return step;
  }
  step.state.banked[me] += step.state.turn_total[me];
  step.state.turn_total[me] = 0;
  if (step.state.banked[me] >= step.state.target) step.winner = actor;
  return step;
}

namespace detail {
const GameRules& pig_rules() {
  static const PigRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
