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

#ifndef SELFPLAY_EVAL_HPP_
#define SELFPLAY_EVAL_HPP_

// Evaluation harness and exact oracles: match play with score intervals,
// head-to-head tournaments, Kuhn poker best-response exploitability,
// TicTacToe minimax and enumeration of expected returns.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfplay/advantage.hpp"
#include "selfplay/agents.hpp"
#include "selfplay/config.hpp"
#include "selfplay/env.hpp"
#include "selfplay/policy.hpp"

namespace selfplay {

// ---------------------------------------------------------------------------
// Match play.

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for `successes` out of `n` at z = 1.96.
Interval wilson_interval(int successes, int n, double z = 1.96);

struct MatchReport {
  GameId game = GameId::kKuhnPoker;
  std::string agent_a;
  std::string agent_b;
  int n_games = 0;
  int wins = 0;  // for agent A
  int draws = 0;
  int losses = 0;
  int games_as_p0 = 0;  // games in which A held player 0
  double win_rate = 0.0;
  Interval win_rate_ci;
  double decisive_win_rate = 0.5;  // wins / (wins + losses); 0.5 if none
  double mean_length = 0.0;
  double invalid_rate_a = 0.0;  // forfeits caused by A per game
  double invalid_rate_b = 0.0;
  double mean_entropy_a = 0.0;  // over A's recorded policy turns
};

// `n_games` games with seeds derived from `seed`; A's seat is drawn
// uniformly per game. Games run on up to `threads` workers and aggregate in
// game order, so the report does not depend on `threads`.
MatchReport play_match(const Agent& a, const Agent& b, GameId game,
                       const GameOptions& options, int n_games, std::uint64_t seed,
                       int threads = 1);

nlohmann::json match_to_json(const MatchReport& report);
std::string match_csv_header();
std::string match_csv_row(const MatchReport& report);

struct NamedAgent {
  std::string name;
  const Agent* agent = nullptr;
};

struct HeadToHeadReport {
  std::vector<MatchReport> pairs;   // every unordered pair, i < j
  std::vector<std::string> agents;
  std::vector<double> pooled_win_rate;    // total wins / total games
  std::vector<double> averaged_win_rate;  // mean of per-pair win rates
};

HeadToHeadReport head_to_head(std::span<const NamedAgent> agents, GameId game,
                              const GameOptions& options, int games_per_pair,
                              std::uint64_t seed, int threads = 1);

nlohmann::json head_to_head_to_json(const HeadToHeadReport& report);

// ---------------------------------------------------------------------------
// Kuhn poker exploitability (single round, chip utility).

// Game value to the opening player when both sides play an equilibrium.
inline constexpr double kKuhnGameValue = -1.0 / 18.0;

// Move distribution over the alphabet {check, bet, call, fold} for the role
// on move holding `card` after the within-round `history`. Only the legal
// pair may carry mass; the oracle renormalizes it.
using KuhnStrategy =
    std::function<std::array<double, 4>(Role role, Card card, std::span<const KuhnMove> history)>;

KuhnStrategy kuhn_uniform_strategy();
KuhnStrategy kuhn_nash_strategy(double alpha = 1.0 / 6.0);
// Within-round strategy read from a policy table, legal mass renormalized.
// `options` selects the key layout (round and chip-bucket fields).
KuhnStrategy kuhn_policy_strategy(const PolicyParams& params, const GameOptions& options);

struct ExploitabilityReport {
  std::string policy_id;
  std::array<double, 2> best_response_value{};  // BR to the policy, by BR role
  std::array<double, 2> policy_value{};          // policy against itself, by role
  std::array<double, 2> nash_gap{};  // best_response_value[p] - game value of p
  double exploitability = 0.0;       // mean of nash_gap
};

ExploitabilityReport kuhn_exploitability(const KuhnStrategy& strategy,
                                         std::string policy_id = "");
ExploitabilityReport kuhn_exploitability(const PolicyParams& params,
                                         const GameOptions& options,
                                         std::string policy_id = "");

// Expected chips to player 0 of one round with the given strategies.
double kuhn_round_value(const KuhnStrategy& p0, const KuhnStrategy& p1);

nlohmann::json exploitability_to_json(const ExploitabilityReport& report);

// ---------------------------------------------------------------------------
// TicTacToe minimax.

struct MinimaxResult {
  int value = 0;                     // from the view of the side to move
  std::vector<int> optimal_actions;  // empty at terminal positions
};

// Throws kIllegalPosition for unreachable boards.
MinimaxResult tictactoe_minimax(const std::array<Mark, 9>& cells);

// ---------------------------------------------------------------------------
// Exact expected returns.

inline constexpr long long kMaxEnumerationBranches = 1'000'000;

// Sums over chance outcomes and every action branch with positive
// probability. Supports single-round KuhnPoker, TicTacToe and FixedHorizon;
// other games, or trees above kMaxEnumerationBranches terminal branches,
// throw kGameTooLarge.
std::array<double, 2> enumerate_expected_return(GameId game, const GameOptions& options,
                                                const std::array<const Agent*, 2>& seats);

// ---------------------------------------------------------------------------
// Metrics suite for one policy.

struct GameMetrics {
  GameId game = GameId::kKuhnPoker;
  MatchReport vs_random;
  std::vector<MatchReport> vs_scripted;
  std::array<double, 2> baseline{};
  std::optional<double> exploitability;  // single-round KuhnPoker only
};

struct MetricsRow {
  std::vector<GameMetrics> games;
};

// Win rates against the configured reference opponents, invalid-move rate,
// mean length and entropy (from the random-opponent match) and baselines.
MetricsRow metrics_suite(const PolicyParams& params, const BaselineTable& baselines,
                         const RunConfig& config, std::uint64_t seed, int threads = 1);

nlohmann::json metrics_to_json(const MetricsRow& row);
// Aligned text table, one line per match.
std::string metrics_table(const MetricsRow& row);
std::string metrics_csv(const MetricsRow& row);

}  // namespace selfplay

#endif  // SELFPLAY_EVAL_HPP_
