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

constexpr int kRows = kConnectFourRows;
constexpr int kCols = kConnectFourCols;

char mark_char(Mark m) { return m == Mark::kX ? 'X' : (m == Mark::kO ? 'O' : '.'); }

// Length of the run through (row, col) along (dr, dc) in both directions.
int run_length(const ConnectFourState& s, int row, int col, int dr, int dc) {
  const Mark m = s.grid[row][col];
  int n = 1;
  for (int sign : {1, -1}) {
    int r = row + sign * dr;
    int c = col + sign * dc;
    while (r >= 0 && r < kRows && c >= 0 && c < kCols && s.grid[r][c] == m) {
      ++n;
      r += sign * dr;
      c += sign * dc;
    }
  }
  return n;
}

class ConnectFourRules final : public detail::GameRules {
 public:
  ConnectFourRules() {
    for (int c = 0; c < kCols; ++c) names_.push_back("col" + std::to_string(c));
  }

  std::span<const std::string> alphabet() const override { return names_; }
  int turn_limit(const GameOptions&) const override { return kRows * kCols; }

  GamePayload initial(const GameOptions&, ChanceStream&) const override {
    return ConnectFourState{};
  }

  std::vector<int> legal(const GameState& state) const override {
    std::vector<int> out;
    for (int c = 0; c < kCols; ++c) {
      if (is_legal(state, c)) out.push_back(c);
    }
    return out;
  }

  bool is_legal(const GameState& state, int action) const override {
    return std::get<ConnectFourState>(state.payload).grid[kRows - 1][action] ==
           Mark::kEmpty;
  }

  void advance(GameState& next, int action) const override {
    auto& s = std::get<ConnectFourState>(next.payload);
    const Mark m = role_at_turn(next.turn) == Role::kPlayer0 ? Mark::kX : Mark::kO;
    int row = 0;
    while (s.grid[row][action] != Mark::kEmpty) ++row;
    s.grid[row][action] = m;
    for (auto [dr, dc] : {std::pair{0, 1}, {1, 0}, {1, 1}, {1, -1}}) {
      if (run_length(s, row, action, dr, dc) >= 4) {
        detail::finish(next, m == Mark::kX ? +1 : -1, Reason::kNaturalEnd);
        return;
      }
    }
    if (next.turn + 1 == kRows * kCols) {
      detail::finish(next, 0, Reason::kNaturalEnd);
    }
  }

  // Key: 42 cells, bottom row first, each row left to right.
  std::string observation(const GameState& state, Role) const override {
    return describe(state);
  }

  std::string describe(const GameState& state) const override {
    const auto& s = std::get<ConnectFourState>(state.payload);
    std::string out;
    out.reserve(kRows * kCols + kRows);
    for (int r = 0; r < kRows; ++r) {
      if (r) out += '/';
      for (int c = 0; c < kCols; ++c) out += mark_char(s.grid[r][c]);
    }
    return out;
  }

 private:
  std::vector<std::string> names_;
};

}  // namespace

LineWinner connect_four_winner(const ConnectFourState& s) {
  bool x_line = false;
  bool o_line = false;
  bool full = true;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const Mark m = s.grid[r][c];
      if (m == Mark::kEmpty) {
        full = false;
        continue;
      }
      for (auto [dr, dc] : {std::pair{0, 1}, {1, 0}, {1, 1}, {1, -1}}) {
        const int er = r + 3 * dr;
        const int ec = c + 3 * dc;
        if (er < 0 || er >= kRows || ec < 0 || ec >= kCols) continue;
        bool line = true;
        for (int k = 1; k < 4 && line; ++k) {
          line = s.grid[r + k * dr][c + k * dc] == m;
        }
        if (line) (m == Mark::kX ? x_line : o_line) = true;
      }
    }
  }
  if (x_line && o_line) {
    throw Error(ErrorKind::kIllegalPosition, "both colours own a line of four");
  }
  if (x_line) return LineWinner::kPlayer0;
  if (o_line) return LineWinner::kPlayer1;
  return full ? LineWinner::kDraw : LineWinner::kOngoing;
}

namespace detail {
const GameRules& connect_four_rules() {
  static const ConnectFourRules rules;
  return rules;
}
}  // namespace detail

}  // namespace selfplay
