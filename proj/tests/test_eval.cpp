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

#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "selfplay/agents.hpp"
#include "selfplay/eval.hpp"
#include "selfplay/games.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::thrown_kind;

namespace {

std::array<Mark, 9> board(const char* text) {
  std::array<Mark, 9> cells{};
  for (int i = 0; i < 9; ++i) {
    cells[i] = text[i] == 'X' ? Mark::kX : (text[i] == 'O' ? Mark::kO : Mark::kEmpty);
  }
  return cells;
}

bool has_line(const std::array<Mark, 9>& c, Mark m) {
  static constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                                       {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  for (const auto& l : kLines) {
    if (c[l[0]] == m && c[l[1]] == m && c[l[2]] == m) return true;
  }
  return false;
}

// Plain negamax without tables, value for the side to move.
int negamax(std::array<Mark, 9>& c, Mark me) {
  const Mark them = me == Mark::kX ? Mark::kO : Mark::kX;
  if (has_line(c, them)) return -1;
  int best = -2;
  bool moved = false;
  for (int i = 0; i < 9; ++i) {
    if (c[i] != Mark::kEmpty) continue;
    moved = true;
    c[i] = me;
    best = std::max(best, -negamax(c, them));
    c[i] = Mark::kEmpty;
    if (best == 1) break;
  }
  return moved ? best : 0;
}

using Pure = std::array<int, 6>;

// Six binary decisions per role in single-round Kuhn.
//   P0: open with J/Q/K (0 check, 1 bet); after check-bet with J/Q/K (0 fold, 1 call).
//   P1: after check with J/Q/K (0 check, 1 bet); after bet with J/Q/K (0 fold, 1 call).
KuhnStrategy pure_strategy(Pure bits) {
  return [bits](Role, Card card, std::span<const KuhnMove> h) {
    std::array<double, 4> p{};
    const int c = static_cast<int>(card);
    const bool facing_bet = !h.empty() && h.back() == KuhnMove::kBet;
    const int slot = h.size() == 1 ? (facing_bet ? 3 + c : c) : (h.empty() ? c : 3 + c);
    const int bit = bits[slot];
    if (facing_bet) {
      p[static_cast<int>(bit ? KuhnMove::kCall : KuhnMove::kFold)] = 1.0;
    } else {
      p[static_cast<int>(bit ? KuhnMove::kBet : KuhnMove::kCheck)] = 1.0;
    }
    return p;
  };
}

Pure pure_from_index(int i) {
  Pure bits{};
  for (int b = 0; b < 6; ++b) bits[b] = (i >> b) & 1;
  return bits;
}

KuhnStrategy random_strategy(std::uint64_t seed) {
  auto table = std::make_shared<std::map<std::string, double>>();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return [table, gen, u](Role role, Card card, std::span<const KuhnMove> h) mutable {
    std::string key = std::to_string(index(role)) + card_letter(card);
    for (auto m : h) key += std::to_string(static_cast<int>(m));
    auto it = table->find(key);
    if (it == table->end()) it = table->emplace(key, u(gen)).first;
    std::array<double, 4> p{};
    const bool facing_bet = !h.empty() && h.back() == KuhnMove::kBet;
    if (facing_bet) {
      p[static_cast<int>(KuhnMove::kCall)] = it->second;
      p[static_cast<int>(KuhnMove::kFold)] = 1.0 - it->second;
    } else {
      p[static_cast<int>(KuhnMove::kBet)] = it->second;
      p[static_cast<int>(KuhnMove::kCheck)] = 1.0 - it->second;
    }
    return p;
  };
}

}  // namespace

TEST_CASE("tictactoe minimax examples") {
  const auto empty = tictactoe_minimax(board("........."));
  CHECK(empty.value == 0);
  CHECK(empty.optimal_actions.size() == 9);
  const auto win = tictactoe_minimax(board("XX.OO...."));
  CHECK(win.value == 1);
  CHECK(win.optimal_actions == std::vector<int>{2});
  // X in a corner, O in the opposite corner: X forces a win.
  CHECK(tictactoe_minimax(board("X.......O")).value == 1);
  // O to move facing the two-corner fork must answer on an edge.
  const auto defend = tictactoe_minimax(board("X...O...X"));
  CHECK(defend.value == 0);
  CHECK(defend.optimal_actions == std::vector<int>{1, 3, 5, 7});
  CHECK(tictactoe_minimax(board("XXXOO....")).optimal_actions.empty());
  CHECK(thrown_kind([] { tictactoe_minimax(board("XXX......")); }) ==
        ErrorKind::kIllegalPosition);
  CHECK(thrown_kind([] { tictactoe_minimax(board("OO.......")); }) ==
        ErrorKind::kIllegalPosition);
}

TEST_CASE("tictactoe minimax agrees with plain negamax on sampled positions") {
  const UniformRandomAgent random;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GameState s = reset(GameId::kTicTacToe, seed);
    ChanceStream rng(seed);
    while (!s.terminal) {
      auto cells = std::get<TicTacToeState>(s.payload).cells;
      const Mark me = active_role(s) == Role::kPlayer0 ? Mark::kX : Mark::kO;
      const auto result = tictactoe_minimax(cells);
      REQUIRE(result.value == negamax(cells, me));
      for (int a : result.optimal_actions) {
        auto next = cells;
        next[a] = me;
        REQUIRE(-negamax(next, me == Mark::kX ? Mark::kO : Mark::kX) == result.value);
      }
      ++checked;
      s = apply(s, {s.game, random.act(s, rng).action});
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("uniform Kuhn strategy exploitability is 11/24") {
  const auto report = kuhn_exploitability(kuhn_uniform_strategy(), "uniform");
  CHECK(report.exploitability == doctest::Approx(0.458333333333333).epsilon(1e-12));
  CHECK(report.exploitability == doctest::Approx(11.0 / 24.0).epsilon(1e-12));
  CHECK(report.policy_id == "uniform");
}

TEST_CASE("every equilibrium of the family has zero exploitability") {
  for (double alpha : {0.0, 1.0 / 6.0, 1.0 / 3.0}) {
    const auto report = kuhn_exploitability(kuhn_nash_strategy(alpha));
    CHECK(std::abs(report.exploitability) < 1e-12);
    CHECK(report.best_response_value[0] == doctest::Approx(kKuhnGameValue));
    CHECK(report.best_response_value[1] == doctest::Approx(-kKuhnGameValue));
  }
}

TEST_CASE("best response equals the best of 64 pure strategies") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const KuhnStrategy sigma = random_strategy(seed);
    double best0 = -10.0, best1 = -10.0;
    for (int i = 0; i < 64; ++i) {
      const KuhnStrategy pure = pure_strategy(pure_from_index(i));
      best0 = std::max(best0, kuhn_round_value(pure, sigma));
      best1 = std::max(best1, -kuhn_round_value(sigma, pure));
    }
    const auto report = kuhn_exploitability(sigma);
    CHECK(report.best_response_value[0] == doctest::Approx(best0).epsilon(1e-12));
    CHECK(report.best_response_value[1] == doctest::Approx(best1).epsilon(1e-12));
    CHECK(report.exploitability ==
          doctest::Approx(0.5 * (best0 - kKuhnGameValue + best1 + kKuhnGameValue)));
    CHECK(report.best_response_value[0] >= report.policy_value[0] - 1e-12);
    CHECK(report.best_response_value[1] >= report.policy_value[1] - 1e-12);
    CHECK(report.exploitability >= -1e-12);
  }
}

TEST_CASE("policy tables map onto Kuhn strategies") {
  GameOptions options;
  options.kuhn_rounds = 1;
  const PolicyParams uniform;
  CHECK(kuhn_exploitability(uniform, options).exploitability ==
        doctest::Approx(11.0 / 24.0).epsilon(1e-12));
  // A table that always bets or calls with a king and never otherwise.
  PolicyParams params;
  const KuhnStrategy target = [](Role, Card card, std::span<const KuhnMove> h) {
    std::array<double, 4> p{};
    const bool facing_bet = !h.empty() && h.back() == KuhnMove::kBet;
    const bool king = card == Card::kKing;
    if (facing_bet) {
      p[static_cast<int>(king ? KuhnMove::kCall : KuhnMove::kFold)] = 1.0;
    } else {
      p[static_cast<int>(king ? KuhnMove::kBet : KuhnMove::kCheck)] = 1.0;
    }
    return p;
  };
  const UniformRandomAgent random;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    GameState s = reset(GameId::kKuhnPoker, seed, options);
    ChanceStream rng(seed);
    while (!s.terminal) {
      const Role r = active_role(s);
      const auto& k = std::get<KuhnState>(s.payload);
      const auto p = target(r, k.cards[index(r)], k.history);
      auto& v = params.materialize(observe(s, r).canonical(), GameId::kKuhnPoker);
      for (int a = 0; a < 4; ++a) v[a] = p[a] > 0 ? 40.0 : 0.0;
      s = apply(s, {s.game, random.act(s, rng).action});
    }
  }
  const auto from_table = kuhn_exploitability(params, options);
  const auto direct = kuhn_exploitability(target);
  CHECK(from_table.exploitability == doctest::Approx(direct.exploitability).epsilon(1e-9));
}

TEST_CASE("exact expected returns") {
  const UniformRandomAgent random;
  const auto ttt = enumerate_expected_return(GameId::kTicTacToe, {}, {&random, &random});
  // Uniform random play favours the first mover.
  CHECK(ttt[0] == doctest::Approx(0.29689).epsilon(1e-4));
  CHECK(ttt[0] + ttt[1] == 0.0);

  GameOptions one;
  one.kuhn_rounds = 1;
  const ScriptedAgent nash(GameId::kKuhnPoker, "nash");
  const auto exact = enumerate_expected_return(GameId::kKuhnPoker, one, {&nash, &random});
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    sum += play_game(GameId::kKuhnPoker, one, derive_seed(4, i), {&nash, &random}).rho();
  }
  CHECK(std::abs(sum / n - exact[0]) < 4.0 / std::sqrt(n));
}

TEST_CASE("enumeration of deterministic play equals the played outcome") {
  const ScriptedAgent minimax(GameId::kTicTacToe, "minimax");
  const auto exact = enumerate_expected_return(GameId::kTicTacToe, {}, {&minimax, &minimax});
  const auto report = play_match(minimax, minimax, GameId::kTicTacToe, {}, 20, 5);
  CHECK(exact[0] == 0.0);
  CHECK(report.draws == 20);

  GameOptions horizon;
  horizon.horizon_length = 6;
  horizon.horizon_legal = 3;
  const ScriptedAgent first(GameId::kFixedHorizon, "first-legal");
  const auto value = enumerate_expected_return(GameId::kFixedHorizon, horizon, {&first, &first});
  const auto tr = play_game(GameId::kFixedHorizon, horizon, 1, {&first, &first});
  CHECK(value[0] == tr.rho());
}

TEST_CASE("enumeration refuses large or chance-heavy games") {
  const UniformRandomAgent random;
  CHECK(thrown_kind([&] {
          enumerate_expected_return(GameId::kConnectFour, {}, {&random, &random});
        }) == ErrorKind::kGameTooLarge);
  CHECK(thrown_kind([&] {
          enumerate_expected_return(GameId::kKuhnPoker, {}, {&random, &random});
        }) == ErrorKind::kGameTooLarge);
  CHECK(thrown_kind([&] {
          enumerate_expected_return(GameId::kPigDice, {}, {&random, &random});
        }) == ErrorKind::kGameTooLarge);
}

TEST_CASE("wilson interval") {
  const Interval half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(half.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const Interval none = wilson_interval(0, 10);
  CHECK(none.lo == doctest::Approx(0.0));
  CHECK(none.hi == doctest::Approx(0.2775).epsilon(1e-3));
  const Interval empty = wilson_interval(0, 0);
  CHECK(empty.lo == 0.0);
  CHECK(empty.hi == 1.0);
}

TEST_CASE("match reports do not depend on the thread count") {
  const ScriptedAgent heuristic(GameId::kTicTacToe, "win-block-else-random");
  const UniformRandomAgent random;
  const auto a = play_match(heuristic, random, GameId::kTicTacToe, {}, 300, 7, 1);
  const auto b = play_match(heuristic, random, GameId::kTicTacToe, {}, 300, 7, 4);
  CHECK(match_csv_row(a) == match_csv_row(b));
  CHECK(a.wins + a.draws + a.losses == 300);
  CHECK(a.games_as_p0 > 100);
  CHECK(a.games_as_p0 < 200);
  CHECK(a.win_rate == doctest::Approx(a.wins / 300.0));
  CHECK(a.win_rate_ci.lo <= a.win_rate);
  CHECK(a.win_rate_ci.hi >= a.win_rate);
}

TEST_CASE("head-to-head covers every pair") {
  const ScriptedAgent minimax(GameId::kTicTacToe, "minimax");
  const ScriptedAgent heuristic(GameId::kTicTacToe, "win-block-else-random");
  const UniformRandomAgent random;
  const std::vector<NamedAgent> agents = {
      {"minimax", &minimax}, {"heuristic", &heuristic}, {"random", &random}};
  const auto report = head_to_head(agents, GameId::kTicTacToe, {}, 100, 3);
  REQUIRE(report.pairs.size() == 3);
  CHECK(report.pairs[0].agent_a == "minimax");
  CHECK(report.pairs[0].agent_b == "heuristic");
  CHECK(report.pairs[0].losses == 0);
  CHECK(report.pooled_win_rate[0] > report.pooled_win_rate[2]);
  CHECK(report.averaged_win_rate[1] > report.averaged_win_rate[2]);
  const auto doc = head_to_head_to_json(report);
  CHECK(doc.at("pairs").size() == 3);
}

TEST_CASE("metrics suite invalid-move frequency") {
  const PolicyParams uniform;
  const BaselineTable baselines;
  // Every token legal in every state: full-alphabet sampling never forfeits.
  const RunConfig full = parse_config(
      "mask = \"full\"\n[games]\nFixedHorizon = 1.0\n[game_options]\nhorizon_legal = 4\n"
      "[eval]\ngames = 200\ngreedy = false\n");
  const auto a = metrics_suite(uniform, baselines, full, 1);
  REQUIRE(a.games.size() == 1);
  CHECK(a.games[0].vs_random.invalid_rate_a == 0.0);
  // Masked sampling on Kuhn poker also never forfeits.
  const RunConfig masked = parse_config(
      "mask = \"legal\"\n[game_options]\nkuhn_rounds = 1\n[eval]\ngames = 200\n");
  const auto b = metrics_suite(uniform, baselines, masked, 1);
  CHECK(b.games[0].vs_random.invalid_rate_a == 0.0);
  REQUIRE(b.games[0].exploitability.has_value());
  CHECK(*b.games[0].exploitability == doctest::Approx(11.0 / 24.0));
  // Full-alphabet sampling on Kuhn poker forfeits: half its tokens are illegal.
  const RunConfig kuhn_full = parse_config("mask = \"full\"\n[eval]\ngames = 200\n");
  CHECK(metrics_suite(uniform, baselines, kuhn_full, 1).games[0].vs_random.invalid_rate_a > 0.3);
  CHECK(metrics_table(b).find("KuhnPoker") != std::string::npos);
  CHECK(metrics_to_json(b).size() == 1);
}
