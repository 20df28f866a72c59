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

constexpr int kHorizonAlphabet = 4;

// Fixed-length diagnostic game: exactly `length` turns, only the first
// `legal_count` tokens are legal. Player 0 wins iff the sum of the action
// indices is even.
class FixedHorizonRules final : public detail::GameRules {
 public:
  std::span<const std::string> alphabet() const override { return names_; }

  int turn_limit(const GameOptions& options) const override {
    return options.horizon_length;
  }

  GamePayload initial(const GameOptions& options, ChanceStream&) const override {
    if (options.horizon_length < 1 || options.horizon_legal < 1 ||
        options.horizon_legal > kHorizonAlphabet) {
      throw Error(ErrorKind::kConfig, "invalid FixedHorizon options");
    }
    return FixedHorizonState{options.horizon_length, options.horizon_legal, 0};
  }

  std::vector<int> legal(const GameState& state) const override {
    std::vector<int> out;
    const auto& s = std::get<FixedHorizonState>(state.payload);
    for (int a = 0; a < s.legal_count; ++a) out.push_back(a);
    return out;
  }

  bool is_legal(const GameState& state, int action) const override {
    return action < std::get<FixedHorizonState>(state.payload).legal_count;
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<FixedHorizonState>(next.payload);
    s.action_sum += action;
    if (next.turn + 1 == s.length) {
      detail::finish(next, s.action_sum % 2 == 0 ? +1 : -1, Reason::kNaturalEnd);
    }
  }

  // Key: "t=<turn>".
  std::string observation(const GameState& state, Role) const override {
    return "t=" + std::to_string(state.turn);
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<FixedHorizonState>(state.payload);
    return "sum " + std::to_string(s.action_sum) + " of " +
           std::to_string(s.length) + " turns";
  }

 private:
  std::vector<std::string> names_ = {"a0", "a1", "a2", "a3"};
};

}  // namespace

namespace detail {
const GameRules& fixed_horizon_rules() {
  static const FixedHorizonRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
