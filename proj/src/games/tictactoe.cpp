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

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                              {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

char mark_char(Mark m) {
  switch (m) {
    case Mark::kEmpty: return '.';
    case Mark::kX: return 'X';
    case Mark::kO: return 'O';
  }
  return '?';
}

class TicTacToeRules final : public detail::GameRules {
 public:
  TicTacToeRules() {
    for (int i = 0; i < 9; ++i) names_.push_back("cell" + std::to_string(i));
  }

  std::span<const std::string> alphabet() const override { return names_; }
  int turn_limit(const GameOptions&) const override { return 9; }

  GamePayload initial(const GameOptions&, ChanceStream&) const override {
    return TicTacToeState{};
  }

  std::vector<int> legal(const GameState& state) const override {
    const auto& s = std::get<TicTacToeState>(state.payload);
    std::vector<int> out;
    for (int i = 0; i < 9; ++i) {
      if (s.cells[i] == Mark::kEmpty) out.push_back(i);
    }
    return out;
  }

  bool is_legal(const GameState& state, int action) const override {
    return std::get<TicTacToeState>(state.payload).cells[action] == Mark::kEmpty;
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<TicTacToeState>(next.payload);
    const Role actor = role_at_turn(next.turn);
    s.cells[action] = actor == Role::kPlayer0 ? Mark::kX : Mark::kO;
    switch (tictactoe_winner(s.cells)) {
      case LineWinner::kPlayer0: detail::finish(next, +1, Reason::kNaturalEnd); break;
      case LineWinner::kPlayer1: detail::finish(next, -1, Reason::kNaturalEnd); break;
      case LineWinner::kDraw: detail::finish(next, 0, Reason::kNaturalEnd); break;
      case LineWinner::kOngoing: break;
    }
  }

  // Key: the nine cells row-major, '.', 'X' (player 0) or 'O' (player 1).
  std::string observation(const GameState& state, Role) const override {
    return describe(state);
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<TicTacToeState>(state.payload);
    std::string out(9, '.');
    for (int i = 0; i < 9; ++i) out[i] = mark_char(s.cells[i]);
    return out;
  }

 private:
  std::vector<std::string> names_;
};

}  // namespace

LineWinner tictactoe_winner(const std::array<Mark, 9>& cells) {
  bool x_line = false;
  bool o_line = false;
  for (const auto& line : kLines) {
    const Mark m = cells[line[0]];
    if (m != Mark::kEmpty && m == cells[line[1]] && m == cells[line[2]]) {
      (m == Mark::kX ? x_line : o_line) = true;
    }
  }
  if (x_line && o_line) {
    throw Error(ErrorKind::kIllegalPosition, "both players own a line");
  }
  if (x_line) return LineWinner::kPlayer0;
  if (o_line) return LineWinner::kPlayer1;
  for (Mark m : cells) {
    if (m == Mark::kEmpty) return LineWinner::kOngoing;
  }
  return LineWinner::kDraw;
}

namespace detail {
const GameRules& tictactoe_rules() {
  static const TicTacToeRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
