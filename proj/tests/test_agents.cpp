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

#include "doctest.h"
#include "selfplay/agents.hpp"
#include "selfplay/games.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::thrown_kind;

TEST_CASE("uniform random agent never forfeits") {
  const UniformRandomAgent random;
  for (GameId game : kAllGames) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const Trajectory tr = play_game(game, {}, seed, {&random, &random});
      REQUIRE(tr.reason != Reason::kInvalidMoveForfeit);
      for (const auto& turn : tr.turns) REQUIRE(turn.legal);
    }
  }
}

TEST_CASE("scripted agents only play legal moves") {
  for (GameId game : kAllGames) {
    for (const auto& script : scripts_for(game)) {
      const ScriptedAgent agent(game, script);
      const UniformRandomAgent random;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto a = play_game(game, {}, seed, {&agent, &random});
        const auto b = play_game(game, {}, seed, {&random, &agent});
        REQUIRE(a.reason != Reason::kInvalidMoveForfeit);
        REQUIRE(b.reason != Reason::kInvalidMoveForfeit);
      }
    }
  }
}

TEST_CASE("win-block heuristic rarely loses to random play") {
  const ScriptedAgent heuristic(GameId::kTicTacToe, "win-block-else-random");
  const UniformRandomAgent random;
  int nonloss = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const bool first = i % 2 == 0;
    const auto tr = play_game(GameId::kTicTacToe, {}, derive_seed(8, i),
                              first ? std::array<const Agent*, 2>{&heuristic, &random}
                                    : std::array<const Agent*, 2>{&random, &heuristic});
    const int r = first ? tr.rho() : -tr.rho();
    nonloss += r >= 0;
  }
  CHECK(static_cast<double>(nonloss) / n >= 0.85);
}

TEST_CASE("minimax agent draws itself and never loses") {
  const ScriptedAgent minimax(GameId::kTicTacToe, "minimax");
  const ScriptedAgent heuristic(GameId::kTicTacToe, "win-block-else-random");
  const UniformRandomAgent random;
  for (int i = 0; i < 50; ++i) {
    CHECK(play_game(GameId::kTicTacToe, {}, i, {&minimax, &minimax}).rho() == 0);
  }
  for (int i = 0; i < 300; ++i) {
    REQUIRE(play_game(GameId::kTicTacToe, {}, i, {&minimax, &random}).rho() >= 0);
    REQUIRE(play_game(GameId::kTicTacToe, {}, i, {&random, &minimax}).rho() <= 0);
    REQUIRE(play_game(GameId::kTicTacToe, {}, i, {&heuristic, &minimax}).rho() <= 0);
  }
}

TEST_CASE("unknown scripts are rejected") {
  CHECK(thrown_kind([] { ScriptedAgent(GameId::kTicTacToe, "hold-at-20"); }) ==
        ErrorKind::kUnknownScript);
  CHECK(thrown_kind([] { ScriptedAgent(GameId::kPigDice, "bogus"); }) ==
        ErrorKind::kUnknownScript);
}

TEST_CASE("agent move distributions are normalized") {
  const PolicyAgent policy(PolicySnapshot{}, {1.0, MaskMode::kLegalOnly, false, false});
  const UniformRandomAgent random;
  for (GameId game : kAllGames) {
    std::vector<std::unique_ptr<Agent>> scripted;
    for (const auto& s : scripts_for(game)) {
      scripted.push_back(std::make_unique<ScriptedAgent>(game, s));
    }
    GameState state = reset(game, 17);
    ChanceStream rng(17);
    while (!state.terminal) {
      std::vector<const Agent*> agents = {&policy, &random};
      for (const auto& s : scripted) agents.push_back(s.get());
      for (const Agent* a : agents) {
        const auto probs = a->action_probs(state);
        REQUIRE(probs.size() == alphabet(game).size());
        double total = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
          REQUIRE(probs[i] >= 0.0);
          if (probs[i] > 0.0) REQUIRE(is_legal(state, static_cast<int>(i)));
          total += probs[i];
        }
        REQUIRE(total == doctest::Approx(1.0));
      }
      state = apply(state, {game, random.act(state, rng).action});
    }
  }
}

TEST_CASE("Kuhn equilibrium probabilities") {
  using M = KuhnMove;
  const double alpha = 1.0 / 6.0;
  const auto jack_open = kuhn_nash_probs(Card::kJack, {}, alpha);
  CHECK(jack_open[static_cast<int>(M::kBet)] == doctest::Approx(alpha));
  const auto king_open = kuhn_nash_probs(Card::kKing, {}, alpha);
  CHECK(king_open[static_cast<int>(M::kBet)] == doctest::Approx(3 * alpha));
  const std::vector<M> bet = {M::kBet};
  CHECK(kuhn_nash_probs(Card::kQueen, bet, alpha)[static_cast<int>(M::kCall)] ==
        doctest::Approx(1.0 / 3.0));
  CHECK(kuhn_nash_probs(Card::kKing, bet, alpha)[static_cast<int>(M::kCall)] ==
        doctest::Approx(1.0));
  const std::vector<M> check = {M::kCheck};
  CHECK(kuhn_nash_probs(Card::kJack, check, alpha)[static_cast<int>(M::kBet)] ==
        doctest::Approx(1.0 / 3.0));
  const std::vector<M> check_bet = {M::kCheck, M::kBet};
  CHECK(kuhn_nash_probs(Card::kQueen, check_bet, alpha)[static_cast<int>(M::kCall)] ==
        doctest::Approx(alpha + 1.0 / 3.0));
}

TEST_CASE("play_game is deterministic in its seed") {
  const PolicyAgent policy(PolicySnapshot{}, {1.0, MaskMode::kFullAlphabet, false, true});
  for (GameId game : kAllGames) {
    const auto a = play_game(game, {}, 99, {&policy, &policy});
    const auto b = play_game(game, {}, 99, {&policy, &policy});
    REQUIRE(a.turns.size() == b.turns.size());
    for (std::size_t i = 0; i < a.turns.size(); ++i) {
      REQUIRE(a.turns[i].action == b.turns[i].action);
      REQUIRE(a.turns[i].logprob == b.turns[i].logprob);
    }
    CHECK(a.returns == b.returns);
  }
}
