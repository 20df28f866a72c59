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

#include "selfplay/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>

#include "selfplay/error.hpp"
#include "selfplay/games.hpp"
#include "selfplay/parallel.hpp"

namespace selfplay {

// ---------------------------------------------------------------------------
// Match play.

Interval wilson_interval(int successes, int n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

MatchReport play_match(const Agent& a, const Agent& b, GameId game,
                       const GameOptions& options, int n_games, std::uint64_t seed,
                       int threads) {
  struct GameResult {
    Role a_role = Role::kPlayer0;
    Trajectory trajectory;
  };
  std::vector<GameResult> results(std::max(0, n_games));
  parallel_for(n_games, threads, [&](int i) {
    const std::uint64_t game_seed = derive_seed(seed, static_cast<std::uint64_t>(i) + 1);
    ChanceStream seat(derive_seed(game_seed, 0x5EA7));
    const Role a_role = seat.uniform_int(2) == 0 ? Role::kPlayer0 : Role::kPlayer1;
    std::array<const Agent*, 2> seats{};
    seats[index(a_role)] = &a;
    seats[index(opponent(a_role))] = &b;
    results[i] = {a_role, play_game(game, options, game_seed, seats)};
  });

  MatchReport r;
  r.game = game;
  r.agent_a = a.name();
  r.agent_b = b.name();
  r.n_games = n_games;
  long long turns = 0;
  int invalid_a = 0, invalid_b = 0;
  double entropy_sum = 0.0;
  long long entropy_count = 0;
  for (const auto& g : results) {
    const Trajectory& tr = g.trajectory;
    const int ret = tr.returns[index(g.a_role)];
    if (ret > 0) ++r.wins;
    else if (ret < 0) ++r.losses;
    else ++r.draws;
    if (g.a_role == Role::kPlayer0) ++r.games_as_p0;
    turns += static_cast<long long>(tr.turns.size());
    if (tr.reason == Reason::kInvalidMoveForfeit && !tr.turns.empty()) {
      (tr.turns.back().role == g.a_role ? invalid_a : invalid_b) += 1;
    }
    for (const auto& t : tr.turns) {
      if (t.role == g.a_role && t.policy_turn) {
        entropy_sum += t.entropy;
        ++entropy_count;
      }
    }
  }
  if (n_games > 0) {
    r.win_rate = static_cast<double>(r.wins) / n_games;
    r.mean_length = static_cast<double>(turns) / n_games;
    r.invalid_rate_a = static_cast<double>(invalid_a) / n_games;
    r.invalid_rate_b = static_cast<double>(invalid_b) / n_games;
  }
  r.win_rate_ci = wilson_interval(r.wins, n_games);
  const int decisive = r.wins + r.losses;
  r.decisive_win_rate = decisive > 0 ? static_cast<double>(r.wins) / decisive : 0.5;
  r.mean_entropy_a = entropy_count > 0 ? entropy_sum / entropy_count : 0.0;
  return r;
}

nlohmann::json match_to_json(const MatchReport& r) {
  return {{"game", game_name(r.game)},
          {"agent_a", r.agent_a},
          {"agent_b", r.agent_b},
          {"n_games", r.n_games},
          {"wins", r.wins},
          {"draws", r.draws},
          {"losses", r.losses},
          {"games_as_p0", r.games_as_p0},
          {"win_rate", r.win_rate},
          {"win_rate_lo", r.win_rate_ci.lo},
          {"win_rate_hi", r.win_rate_ci.hi},
          {"decisive_win_rate", r.decisive_win_rate},
          {"mean_length", r.mean_length},
          {"invalid_rate_a", r.invalid_rate_a},
          {"invalid_rate_b", r.invalid_rate_b},
          {"mean_entropy_a", r.mean_entropy_a}};
}

std::string match_csv_header() {
  return "game,agent_a,agent_b,n_games,wins,draws,losses,win_rate,win_rate_lo,"
         "win_rate_hi,decisive_win_rate,mean_length,invalid_rate_a,invalid_rate_b,"
         "mean_entropy_a";
}

std::string match_csv_row(const MatchReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%s,%s,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                std::string(game_name(r.game)).c_str(), r.agent_a.c_str(), r.agent_b.c_str(),
                r.n_games, r.wins, r.draws, r.losses, r.win_rate, r.win_rate_ci.lo,
                r.win_rate_ci.hi, r.decisive_win_rate, r.mean_length, r.invalid_rate_a,
                r.invalid_rate_b, r.mean_entropy_a);
  return buf;
}

HeadToHeadReport head_to_head(std::span<const NamedAgent> agents, GameId game,
                              const GameOptions& options, int games_per_pair,
                              std::uint64_t seed, int threads) {
  HeadToHeadReport report;
  const std::size_t n = agents.size();
  std::vector<long long> wins(n, 0), games(n, 0);
  std::vector<double> rate_sum(n, 0.0);
  std::vector<int> pairs(n, 0);
  for (const auto& a : agents) report.agents.push_back(a.name);
  std::uint64_t pair_index = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      MatchReport m = play_match(*agents[i].agent, *agents[j].agent, game, options,
                                 games_per_pair, derive_seed(seed, ++pair_index), threads);
      m.agent_a = agents[i].name;
      m.agent_b = agents[j].name;
      wins[i] += m.wins;
      wins[j] += m.losses;
      games[i] += m.n_games;
      games[j] += m.n_games;
      rate_sum[i] += m.win_rate;
      rate_sum[j] += m.n_games > 0 ? static_cast<double>(m.losses) / m.n_games : 0.0;
      ++pairs[i];
      ++pairs[j];
      report.pairs.push_back(std::move(m));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    report.pooled_win_rate.push_back(games[i] > 0 ? static_cast<double>(wins[i]) / games[i] : 0.0);
    report.averaged_win_rate.push_back(pairs[i] > 0 ? rate_sum[i] / pairs[i] : 0.0);
  }
  return report;
}

nlohmann::json head_to_head_to_json(const HeadToHeadReport& report) {
  nlohmann::json doc;
  doc["pairs"] = nlohmann::json::array();
  for (const auto& m : report.pairs) doc["pairs"].push_back(match_to_json(m));
  doc["agents"] = nlohmann::json::array();
  for (std::size_t i = 0; i < report.agents.size(); ++i) {
    doc["agents"].push_back({{"name", report.agents[i]},
                             {"pooled_win_rate", report.pooled_win_rate[i]},
                             {"averaged_win_rate", report.averaged_win_rate[i]}});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Kuhn poker exploitability.

namespace {

using History = std::vector<KuhnMove>;

constexpr std::array<std::array<Card, 2>, 6> kDeals = {{
    {Card::kJack, Card::kQueen}, {Card::kJack, Card::kKing},
    {Card::kQueen, Card::kJack}, {Card::kQueen, Card::kKing},
    {Card::kKing, Card::kJack}, {Card::kKing, Card::kQueen},
}};

std::array<KuhnMove, 2> kuhn_legal(const History& h) {
  if (!h.empty() && h.back() == KuhnMove::kBet) return {KuhnMove::kCall, KuhnMove::kFold};
  return {KuhnMove::kCheck, KuhnMove::kBet};
}

Role kuhn_actor(const History& h) { return h.size() % 2 == 0 ? Role::kPlayer0 : Role::kPlayer1; }

// Legal-renormalized probabilities of the two legal moves.
std::array<double, 2> legal_probs(const KuhnStrategy& s, Role role, Card card,
                                  const History& h) {
  const auto p = s(role, card, h);
  const auto legal = kuhn_legal(h);
  double a = p[static_cast<int>(legal[0])], b = p[static_cast<int>(legal[1])];
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  const double total = a + b;
  if (!(total > 0.0)) return {0.5, 0.5};
  return {a / total, b / total};
}

double round_value(const std::array<Card, 2>& cards, History& h,
                   const std::array<const KuhnStrategy*, 2>& s) {
  if (kuhn_round_over(h)) return kuhn_round_settle(cards, h);
  const Role actor = kuhn_actor(h);
  const auto legal = kuhn_legal(h);
  const auto p = legal_probs(*s[index(actor)], actor, cards[index(actor)], h);
  double v = 0.0;
  for (int k = 0; k < 2; ++k) {
    if (p[k] == 0.0) continue;
    h.push_back(legal[k]);
    v += p[k] * round_value(cards, h, s);
    h.pop_back();
  }
  return v;
}

// Best response of `br` to `policy` by backward induction over br's
// information sets (own card, history).
class BestResponse {
 public:
  BestResponse(const KuhnStrategy& policy, Role br) : policy_(policy), br_(br) {}

  double value() {
    double total = 0.0;
    for (const auto& cards : kDeals) {
      History h;
      total += node(cards, h) / 6.0;
    }
    return total;
  }

 private:
  // Chips to br at this node, br playing its chosen actions.
  double node(const std::array<Card, 2>& cards, History& h) {
    if (kuhn_round_over(h)) {
      const double chips = kuhn_round_settle(cards, h);
      return br_ == Role::kPlayer0 ? chips : -chips;
    }
    const Role actor = kuhn_actor(h);
    const auto legal = kuhn_legal(h);
    if (actor == br_) {
      h.push_back(legal[choice(cards[index(br_)], h)]);
      const double v = node(cards, h);
      h.pop_back();
      return v;
    }
    const auto p = legal_probs(policy_, actor, cards[index(actor)], h);
    double v = 0.0;
    for (int k = 0; k < 2; ++k) {
      if (p[k] == 0.0) continue;
      h.push_back(legal[k]);
      v += p[k] * node(cards, h);
      h.pop_back();
    }
    return v;
  }

  // Probability that the policy's moves in `h` occur when it holds `card`.
  double opponent_reach(Card card, const History& h) const {
    double reach = 1.0;
    History prefix;
    for (KuhnMove m : h) {
      const Role actor = kuhn_actor(prefix);
      if (actor != br_) {
        const auto legal = kuhn_legal(prefix);
        const auto p = legal_probs(policy_, actor, card, prefix);
        reach *= m == legal[0] ? p[0] : p[1];
      }
      prefix.push_back(m);
    }
    return reach;
  }

  int choice(Card own, History& h) {
    const auto legal = kuhn_legal(h);
    std::array<double, 2> value{};
    for (int k = 0; k < 2; ++k) {
      h.push_back(legal[k]);
      for (const auto& cards : kDeals) {
        if (cards[index(br_)] != own) continue;
        History prefix(h.begin(), h.end() - 1);
        const double reach = opponent_reach(cards[index(opponent(br_))], prefix);
        if (reach == 0.0) continue;
        value[k] += reach * node(cards, h);
      }
      h.pop_back();
    }
    return value[1] > value[0] ? 1 : 0;
  }

  const KuhnStrategy& policy_;
  Role br_;
};

}  // namespace

KuhnStrategy kuhn_uniform_strategy() {
  return [](Role, Card, std::span<const KuhnMove>) {
    return std::array<double, 4>{0.25, 0.25, 0.25, 0.25};
  };
}

KuhnStrategy kuhn_nash_strategy(double alpha) {
  return [alpha](Role, Card card, std::span<const KuhnMove> history) {
    return kuhn_nash_probs(card, history, alpha);
  };
}

KuhnStrategy kuhn_policy_strategy(const PolicyParams& params, const GameOptions& options) {
  GameOptions one_round = options;
  one_round.kuhn_rounds = 1;
  return [&params, one_round](Role role, Card card, std::span<const KuhnMove> history) {
    std::array<Card, 2> cards{};
    cards[index(role)] = card;
    cards[index(opponent(role))] = card == Card::kJack ? Card::kQueen : Card::kJack;
    GameState state = kuhn_state_with_deal(cards, one_round);
    for (KuhnMove m : history) {
      state = apply(state, ActionToken{GameId::kKuhnPoker, static_cast<int>(m)});
    }
    const auto probs = action_distribution(params, observe(state, role), 1.0,
                                           ActionMask::legal_only(legal_action_indices(state)));
    std::array<double, 4> out{};
    std::copy_n(probs.begin(), 4, out.begin());
    return out;
  };
}

double kuhn_round_value(const KuhnStrategy& p0, const KuhnStrategy& p1) {
  double total = 0.0;
  for (const auto& cards : kDeals) {
    History h;
    total += round_value(cards, h, {&p0, &p1}) / 6.0;
  }
  return total;
}

ExploitabilityReport kuhn_exploitability(const KuhnStrategy& strategy,
                                         std::string policy_id) {
  ExploitabilityReport r;
  r.policy_id = std::move(policy_id);
  const double self = kuhn_round_value(strategy, strategy);
  r.policy_value = {self, -self};
  const std::array<double, 2> game_value = {kKuhnGameValue, -kKuhnGameValue};
  for (Role role : {Role::kPlayer0, Role::kPlayer1}) {
    const int p = index(role);
    r.best_response_value[p] = BestResponse(strategy, role).value();
    r.nash_gap[p] = r.best_response_value[p] - game_value[p];
  }
  r.exploitability = 0.5 * (r.nash_gap[0] + r.nash_gap[1]);
  return r;
}

ExploitabilityReport kuhn_exploitability(const PolicyParams& params,
                                         const GameOptions& options,
                                         std::string policy_id) {
  return kuhn_exploitability(kuhn_policy_strategy(params, options), std::move(policy_id));
}

nlohmann::json exploitability_to_json(const ExploitabilityReport& r) {
  return {{"policy_id", r.policy_id},
          {"best_response_value", {r.best_response_value[0], r.best_response_value[1]}},
          {"policy_value", {r.policy_value[0], r.policy_value[1]}},
          {"nash_gap", {r.nash_gap[0], r.nash_gap[1]}},
          {"exploitability", r.exploitability}};
}

// ---------------------------------------------------------------------------
// TicTacToe minimax.

namespace {

constexpr int kBoards = 19683;  // 3^9
constexpr signed char kUnreached = 2;

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                              {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

int encode(const std::array<Mark, 9>& cells) {
  int code = 0;
  for (int i = 8; i >= 0; --i) code = code * 3 + static_cast<int>(cells[i]);
  return code;
}

bool has_line(const std::array<Mark, 9>& c) {
  for (const auto& l : kLines) {
    if (c[l[0]] != Mark::kEmpty && c[l[0]] == c[l[1]] && c[l[1]] == c[l[2]]) return true;
  }
  return false;
}

// Values of every reachable board from the side to move's view.
class MinimaxTable {
 public:
  MinimaxTable() : value_(kBoards, kUnreached) {
    std::array<Mark, 9> empty{};
    solve(empty, Mark::kX);
  }

  signed char value(int code) const { return value_[code]; }

  signed char solve(std::array<Mark, 9>& cells, Mark to_move) {
    const int code = encode(cells);
    if (value_[code] != kUnreached) return value_[code];
    signed char best;
    if (has_line(cells)) {
      best = -1;
    } else {
      best = std::find(cells.begin(), cells.end(), Mark::kEmpty) == cells.end() ? 0 : -1;
      const Mark next = to_move == Mark::kX ? Mark::kO : Mark::kX;
      for (int i = 0; i < 9; ++i) {
        if (cells[i] != Mark::kEmpty) continue;
        cells[i] = to_move;
        best = std::max<signed char>(best, static_cast<signed char>(-solve(cells, next)));
        cells[i] = Mark::kEmpty;
      }
    }
    value_[code] = best;
    return best;
  }

 private:
  std::vector<signed char> value_;
};

const MinimaxTable& minimax_table() {
  static const MinimaxTable table;
  return table;
}

}  // namespace

MinimaxResult tictactoe_minimax(const std::array<Mark, 9>& cells) {
  const auto& table = minimax_table();
  const signed char v = table.value(encode(cells));
  if (v == kUnreached) {
    throw Error(ErrorKind::kIllegalPosition, "TicTacToe board is not reachable");
  }
  MinimaxResult r;
  r.value = v;
  if (has_line(cells)) return r;
  const auto xs = std::count(cells.begin(), cells.end(), Mark::kX);
  const auto os = std::count(cells.begin(), cells.end(), Mark::kO);
  const Mark to_move = xs == os ? Mark::kX : Mark::kO;
  auto next = cells;
  for (int i = 0; i < 9; ++i) {
    if (next[i] != Mark::kEmpty) continue;
    next[i] = to_move;
    if (-table.value(encode(next)) == v) r.optimal_actions.push_back(i);
    next[i] = Mark::kEmpty;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exact expected returns.

namespace {

struct Enumerator {
  const std::array<const Agent*, 2>& seats;
  long long branches = 0;
  double expected_r0 = 0.0;

  void run(const GameState& state, double weight) {
    if (state.terminal) {
      if (++branches > kMaxEnumerationBranches) {
        throw Error(ErrorKind::kGameTooLarge,
                    "more than " + std::to_string(kMaxEnumerationBranches) +
                        " trajectory branches");
      }
      expected_r0 += weight * outcome(state).rho;
      return;
    }
    const auto probs = seats[index(active_role(state))]->action_probs(state);
    for (int a = 0; a < static_cast<int>(probs.size()); ++a) {
      if (probs[a] <= 0.0) continue;
      run(apply(state, ActionToken{state.game, a}), weight * probs[a]);
    }
  }
};

}  // namespace

std::array<double, 2> enumerate_expected_return(GameId game, const GameOptions& options,
                                                const std::array<const Agent*, 2>& seats) {
  Enumerator e{seats};
  switch (game) {
    case GameId::kKuhnPoker: {
      if (options.kuhn_rounds != 1) {
        throw Error(ErrorKind::kGameTooLarge,
                    "KuhnPoker enumeration supports single-round matches only");
      }
      for (const auto& cards : kDeals) e.run(kuhn_state_with_deal(cards, options), 1.0 / 6.0);
      break;
    }
    case GameId::kTicTacToe:
    case GameId::kFixedHorizon:
      e.run(reset(game, 0, options), 1.0);
      break;
    default:
      throw Error(ErrorKind::kGameTooLarge, std::string(game_name(game)) +
                                                " has chance or depth beyond exact enumeration");
  }
  return {e.expected_r0, -e.expected_r0};
}

// ---------------------------------------------------------------------------
// Metrics suite.

MetricsRow metrics_suite(const PolicyParams& params, const BaselineTable& baselines,
                         const RunConfig& config, std::uint64_t seed, int threads) {
  MetricsRow row;
  const PolicyAgent policy(snapshot(params),
                           PolicyAgentOptions{config.eval_temperature, config.mask,
                                              config.eval_greedy, true},
                           "policy");
  const UniformRandomAgent random;
  std::uint64_t match_index = 0;
  for (const auto& wg : config.games) {
    GameMetrics gm;
    gm.game = wg.game;
    gm.vs_random = play_match(policy, random, wg.game, config.game_options, config.eval_games,
                              derive_seed(seed, ++match_index), threads);
    for (const auto& script : scripts_for(wg.game)) {
      const ScriptedAgent scripted(wg.game, script);
      gm.vs_scripted.push_back(play_match(policy, scripted, wg.game, config.game_options,
                                          config.eval_games, derive_seed(seed, ++match_index),
                                          threads));
    }
    gm.baseline = {baselines.value(wg.game, Role::kPlayer0),
                   baselines.value(wg.game, Role::kPlayer1)};
    if (wg.game == GameId::kKuhnPoker) {
      gm.exploitability = kuhn_exploitability(params, config.game_options).exploitability;
    }
    row.games.push_back(std::move(gm));
  }
  return row;
}

nlohmann::json metrics_to_json(const MetricsRow& row) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& g : row.games) {
    nlohmann::json item;
    item["game"] = game_name(g.game);
    item["vs_random"] = match_to_json(g.vs_random);
    item["vs_scripted"] = nlohmann::json::array();
    for (const auto& m : g.vs_scripted) item["vs_scripted"].push_back(match_to_json(m));
    item["baseline"] = {g.baseline[0], g.baseline[1]};
    item["exploitability"] =
        g.exploitability ? nlohmann::json(*g.exploitability) : nlohmann::json(nullptr);
    doc.push_back(std::move(item));
  }
  return doc;
}

std::string metrics_table(const MetricsRow& row) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %-22s %7s %7s %7s %8s %8s %8s %8s\n", "game",
                "opponent", "games", "win", "draw", "length", "invalid", "entropy", "expl");
  out << buf;
  for (const auto& g : row.games) {
    std::vector<const MatchReport*> matches = {&g.vs_random};
    for (const auto& m : g.vs_scripted) matches.push_back(&m);
    for (const MatchReport* m : matches) {
      const std::string expl =
          g.exploitability ? std::to_string(*g.exploitability).substr(0, 8) : "-";
      std::snprintf(buf, sizeof buf, "%-18s %-22s %7d %7.3f %7.3f %8.2f %8.4f %8.4f %8s\n",
                    std::string(game_name(g.game)).c_str(), m->agent_b.c_str(), m->n_games,
                    m->win_rate, m->n_games ? static_cast<double>(m->draws) / m->n_games : 0.0,
                    m->mean_length, m->invalid_rate_a, m->mean_entropy_a, expl.c_str());
      out << buf;
    }
  }
  return out.str();
}

std::string metrics_csv(const MetricsRow& row) {
  std::ostringstream out;
  out << match_csv_header() << ",baseline_p0,baseline_p1,exploitability\n";
  for (const auto& g : row.games) {
    std::vector<const MatchReport*> matches = {&g.vs_random};
    for (const auto& m : g.vs_scripted) matches.push_back(&m);
    for (const MatchReport* m : matches) {
      char buf[128];
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", g.baseline[0], g.baseline[1]);
      out << match_csv_row(*m) << buf;
      if (g.exploitability) {
        std::snprintf(buf, sizeof buf, "%.17g", *g.exploitability);
        out << buf;
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace selfplay
