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

#include "selfplay/agents.hpp"

#include <algorithm>
#include <cmath>

#include "selfplay/error.hpp"
#include "selfplay/eval.hpp"
#include "selfplay/games.hpp"

namespace selfplay {

namespace {

std::vector<double> uniform_over(std::size_t alphabet_size,
                                 const std::vector<int>& actions) {
  std::vector<double> probs(alphabet_size, 0.0);
  for (int a : actions) probs[a] = 1.0 / static_cast<double>(actions.size());
  return probs;
}

std::vector<double> one_hot(std::size_t alphabet_size, int action) {
  std::vector<double> probs(alphabet_size, 0.0);
  probs[action] = 1.0;
  return probs;
}

// Cells/columns that win immediately for `role`, else that block the
// opponent's immediate win, else every legal move.
std::vector<int> win_block_candidates(const GameState& state) {
  const Role me = active_role(state);
  const auto legal = legal_action_indices(state);
  std::vector<int> wins;
  for (int a : legal) {
    const auto next = apply(state, {state.game, a});
    if (next.terminal && next.result.reward(me) > 0) wins.push_back(a);
  }
  if (!wins.empty()) return wins;
  // Blocking: pretend the opponent moves now by skipping our turn.
  GameState flipped = state;
  flipped.turn += 1;
  if (flipped.turn >= flipped.turn_limit) return legal;
  std::vector<int> blocks;
  for (int a : legal) {
    const auto next = apply(flipped, {state.game, a});
    if (next.terminal && next.result.reward(opponent(me)) > 0) blocks.push_back(a);
  }
  return blocks.empty() ? legal : blocks;
}

std::vector<double> negotiation_fair_trade(const GameState& state) {
  const auto& s = std::get<NegotiationState>(state.payload);
  const Role me = active_role(state);
  const auto& value = s.valuations[index(me)];
  const std::size_t n = alphabet(state.game).size();
  if (s.pending_offer) {
    const auto& o = *s.pending_offer;
    const int gain = (o.give_wood - o.take_wood) * value.wood +
                     (o.give_gold - o.take_gold) * value.gold;
    if (gain > 0) return one_hot(n, kNegotiationAccept);
  }
  const int proposal = value.gold > value.wood ? encode_offer(2, 0, 0, 2)
                                               : encode_offer(0, 2, 2, 0);
  if (is_legal(state, proposal)) return one_hot(n, proposal);
  return one_hot(n, kNegotiationDeny);
}

std::vector<double> liars_count_based(const GameState& state) {
  const auto& s = std::get<LiarsDiceState>(state.payload);
  const Role me = active_role(state);
  std::array<int, 7> own{};
  for (int d : s.dice[index(me)]) own[d] += 1;
  const double unseen = kLiarsDicePerPlayer / 6.0;
  const std::size_t n = alphabet(state.game).size();
  if (s.current_claim &&
      s.current_claim->quantity > own[s.current_claim->face] + unseen + 0.5) {
    return one_hot(n, kLiarsChallenge);
  }
  int best_face = 1;
  for (int f = 2; f <= 6; ++f) {
    if (own[f] >= own[best_face]) best_face = f;
  }
  const int floor_index =
      s.current_claim
          ? liars_claim_index(s.current_claim->quantity, s.current_claim->face) + 1
          : 0;
  for (int q = 1; q <= kLiarsMaxQuantity; ++q) {
    const int idx = liars_claim_index(q, best_face);
    if (idx < floor_index) continue;
    if (q <= own[best_face] + 1 || !s.current_claim) return one_hot(n, idx);
    break;
  }
  return one_hot(n, kLiarsChallenge);
}

std::vector<double> pig_hold_at_20(const GameState& state) {
  const auto& s = std::get<PigState>(state.payload);
  const int me = index(active_role(state));
  const bool hold = s.turn_total[me] >= 20 || s.banked[me] + s.turn_total[me] >= s.target;
  return one_hot(2, static_cast<int>(hold ? PigAction::kHold : PigAction::kRoll));
}

std::vector<double> kuhn_nash(const GameState& state) {
  const auto& s = std::get<KuhnState>(state.payload);
  const auto p = kuhn_nash_probs(s.cards[index(active_role(state))], s.history, 1.0 / 6.0);
  return {p.begin(), p.end()};
}

}  // namespace

// ---------------------------------------------------------------------------

PolicyAgent::PolicyAgent(PolicySnapshot snapshot, PolicyAgentOptions options,
                         std::string label)
    : snapshot_(std::move(snapshot)), options_(options), label_(std::move(label)) {}

ActionMask PolicyAgent::mask_for(const GameState& state) const {
  if (options_.mask == MaskMode::kFullAlphabet) return ActionMask::full();
  return ActionMask::legal_only(legal_action_indices(state));
}

std::vector<double> PolicyAgent::action_probs(const GameState& state) const {
  const auto obs = observe(state, active_role(state));
  auto probs = action_distribution(snapshot_.params(), obs, options_.temperature,
                                   mask_for(state));
  if (options_.greedy) return one_hot(probs.size(), greedy_index(probs));
  return probs;
}

Decision PolicyAgent::act(const GameState& state, ChanceStream& rng) const {
  const auto obs = observe(state, active_role(state));
  ActionMask mask = mask_for(state);
  const auto probs =
      action_distribution(snapshot_.params(), obs, options_.temperature, mask);
  Decision d;
  d.action = options_.greedy ? greedy_index(probs) : sample_index(probs, rng.uniform01());
  if (options_.record) {
    d.policy_turn = true;
    d.logprob = std::log(probs[d.action]);
    d.entropy = entropy(probs);
    d.obs_key = obs.canonical();
    d.temperature = options_.temperature;
    d.mask_mode = mask.mode;
    d.legal_set = std::move(mask.legal);
  }
  return d;
}

Decision UniformRandomAgent::act(const GameState& state, ChanceStream& rng) const {
  const auto legal = legal_action_indices(state);
  Decision d;
  d.action = legal[rng.uniform_int(static_cast<int>(legal.size()))];
  return d;
}

std::vector<double> UniformRandomAgent::action_probs(const GameState& state) const {
  return uniform_over(alphabet(state.game).size(), legal_action_indices(state));
}

std::vector<std::string> scripts_for(GameId game) {
  switch (game) {
    case GameId::kTicTacToe: return {"win-block-else-random", "minimax"};
    case GameId::kConnectFour: return {"win-block-else-random"};
    case GameId::kKuhnPoker: return {"nash"};
    case GameId::kPigDice: return {"hold-at-20"};
    case GameId::kSimpleNegotiation: return {"fair-trade"};
    case GameId::kLiarsDice: return {"count-based"};
    case GameId::kFixedHorizon: return {"first-legal"};
  }
  return {};
}

ScriptedAgent::ScriptedAgent(GameId game, std::string script)
    : game_(game), script_(std::move(script)) {
  const auto known = scripts_for(game);
  if (std::find(known.begin(), known.end(), script_) == known.end()) {
    throw Error(ErrorKind::kUnknownScript,
                "'" + script_ + "' for " + std::string(game_name(game)));
  }
}

std::vector<double> ScriptedAgent::action_probs(const GameState& state) const {
  const std::size_t n = alphabet(state.game).size();
  if (script_ == "win-block-else-random") {
    return uniform_over(n, win_block_candidates(state));
  }
  if (script_ == "minimax") {
    const auto& cells = std::get<TicTacToeState>(state.payload).cells;
    return uniform_over(n, tictactoe_minimax(cells).optimal_actions);
  }
  if (script_ == "nash") return kuhn_nash(state);
  if (script_ == "hold-at-20") return pig_hold_at_20(state);
  if (script_ == "fair-trade") return negotiation_fair_trade(state);
  if (script_ == "count-based") return liars_count_based(state);
  return one_hot(n, legal_action_indices(state).front());  // first-legal
}

Decision ScriptedAgent::act(const GameState& state, ChanceStream& rng) const {
  Decision d;
  d.action = sample_index(action_probs(state), rng.uniform01());
  return d;
}

std::array<double, 4> kuhn_nash_probs(Card card, std::span<const KuhnMove> history,
                                      double alpha) {
  constexpr int kCheck = 0, kBet = 1, kCall = 2, kFold = 3;
  std::array<double, 4> p{};
  auto mix = [&](int yes, int no, double q) {
    p[yes] = q;
    p[no] = 1.0 - q;
  };
  if (history.empty()) {
    // Opening: bluff J with alpha, value-bet K with 3 alpha, always check Q.
    const double bet = card == Card::kJack ? alpha : (card == Card::kKing ? 3 * alpha : 0.0);
    mix(kBet, kCheck, bet);
  } else if (history.size() == 1 && history[0] == KuhnMove::kBet) {
    const double call = card == Card::kJack ? 0.0 : (card == Card::kQueen ? 1.0 / 3.0 : 1.0);
    mix(kCall, kFold, call);
  } else if (history.size() == 1) {
    const double bet = card == Card::kJack ? 1.0 / 3.0 : (card == Card::kQueen ? 0.0 : 1.0);
    mix(kBet, kCheck, bet);
  } else {
    // Opened with a check and faced a bet.
    const double call =
        card == Card::kJack ? 0.0 : (card == Card::kQueen ? alpha + 1.0 / 3.0 : 1.0);
    mix(kCall, kFold, call);
  }
  return p;
}

std::string_view opponent_kind_name(OpponentKind kind) {
  switch (kind) {
    case OpponentKind::kSelfPlayShared: return "SelfPlayShared";
    case OpponentKind::kUniformRandomLegal: return "UniformRandomLegal";
    case OpponentKind::kScripted: return "Scripted";
    case OpponentKind::kFrozenCheckpoint: return "FrozenCheckpoint";
  }
  return "?";
}

std::optional<OpponentKind> parse_opponent_kind(std::string_view name) {
  for (auto k : {OpponentKind::kSelfPlayShared, OpponentKind::kUniformRandomLegal,
                 OpponentKind::kScripted, OpponentKind::kFrozenCheckpoint}) {
    if (opponent_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::unique_ptr<Agent> make_opponent(const OpponentSpec& spec, GameId game,
                                     const PolicySnapshot* frozen,
                                     double temperature, MaskMode mask) {
  switch (spec.kind) {
    case OpponentKind::kUniformRandomLegal:
      return std::make_unique<UniformRandomAgent>();
    case OpponentKind::kScripted:
      return std::make_unique<ScriptedAgent>(game, spec.script);
    case OpponentKind::kFrozenCheckpoint:
      if (!frozen) throw Error(ErrorKind::kConfig, "frozen opponent without a snapshot");
      return std::make_unique<PolicyAgent>(
          *frozen, PolicyAgentOptions{temperature, mask, spec.greedy, false}, "frozen");
    case OpponentKind::kSelfPlayShared:
      break;
  }
  throw Error(ErrorKind::kConfig, "self-play has no standalone opponent");
}

ActionToken opponent_action(const OpponentSpec& spec, const GameState& state,
                            ChanceStream& rng, const PolicySnapshot* frozen) {
  const auto agent = make_opponent(spec, state.game, frozen, 1.0, MaskMode::kLegalOnly);
  return ActionToken{state.game, agent->act(state, rng).action};
}

Trajectory play_game(GameId game, const GameOptions& options, std::uint64_t seed,
                     const std::array<const Agent*, 2>& seats) {
  Trajectory tr;
  tr.game = game;
  tr.options = options;
  tr.seed = seed;
  std::array<ChanceStream, 2> streams = {ChanceStream(derive_seed(seed, 1)),
                                         ChanceStream(derive_seed(seed, 2))};
  GameState state = reset(game, seed, options);
  while (!state.terminal) {
    const Role role = active_role(state);
    Decision d = seats[index(role)]->act(state, streams[index(role)]);
    TurnRecord turn;
    turn.t = state.turn;
    turn.role = role;
    turn.action = d.action;
    turn.legal = is_legal(state, d.action);
    turn.policy_turn = d.policy_turn;
    turn.logprob = d.logprob;
    turn.entropy = d.entropy;
    turn.temperature = d.temperature;
    turn.mask_mode = d.mask_mode;
    turn.legal_set = std::move(d.legal_set);
    turn.obs_key = d.policy_turn ? std::move(d.obs_key) : observe(state, role).canonical();
    tr.turns.push_back(std::move(turn));
    state = apply(state, ActionToken{game, d.action});
  }
  const Outcome out = outcome(state);
  tr.returns = {out.reward(Role::kPlayer0), out.reward(Role::kPlayer1)};
  tr.reason = out.reason;
  return tr;
}

}  // namespace selfplay
