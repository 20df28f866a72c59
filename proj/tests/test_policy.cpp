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
#include <random>

#include "doctest.h"
#include "selfplay/env.hpp"
#include "selfplay/policy.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::thrown_kind;

namespace {

double log_prob_at(std::vector<double> logits, int action, double temperature,
                   const ActionMask& mask) {
  return std::log(distribution_from_logits(logits, temperature, mask)[action]);
}

}  // namespace

TEST_CASE("unmaterialized keys are uniform over the full alphabet") {
  const PolicyParams params;
  const GameState s = reset(GameId::kTicTacToe, 0);
  const auto probs = action_distribution(params, observe(s, Role::kPlayer0), 1.0,
                                         ActionMask::full());
  REQUIRE(probs.size() == 9);
  for (double p : probs) CHECK(p == doctest::Approx(1.0 / 9.0));
  CHECK(entropy(probs) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  CHECK(params.size() == 0);
}

TEST_CASE("log-probability gradient matches central finite differences") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal(0.0, 1.5);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> logits(7);
    for (double& x : logits) x = normal(gen);
    const double temperature = trial % 2 ? 0.7 : 1.0;
    const ActionMask mask =
        trial % 3 ? ActionMask::full() : ActionMask::legal_only({0, 2, 3, 6});
    const auto probs = distribution_from_logits(logits, temperature, mask);
    const int action = trial % 3 ? trial % 7 : 3;
    const auto grad = logprob_gradient_from_probs(probs, action, temperature, mask);
    for (int i = 0; i < 7; ++i) {
      auto up = logits, down = logits;
      up[i] += h;
      down[i] -= h;
      const double fd = (log_prob_at(up, action, temperature, mask) -
                         log_prob_at(down, action, temperature, mask)) /
                        (2 * h);
      const double scale = std::max(1.0, std::abs(grad[i]));
      REQUIRE(std::abs(fd - grad[i]) / scale <= 1e-6);
    }
  }
}

TEST_CASE("params gradient agrees with the probability form") {
  PolicyParams params;
  const GameState s = reset(GameId::kKuhnPoker, 4);
  const ObservationKey obs = observe(s, Role::kPlayer0);
  auto& logits = params.materialize(obs.canonical(), GameId::kKuhnPoker);
  logits = {0.3, -1.2, 0.8, 0.1};
  const auto probs = action_distribution(params, obs, 1.0, ActionMask::full());
  const auto a = logprob_gradient(params, obs, 1, 1.0, ActionMask::full());
  const auto b = logprob_gradient_from_probs(probs, 1, 1.0, ActionMask::full());
  for (int i = 0; i < 4; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("legal mask restricts support and gradients") {
  const std::vector<double> logits = {5.0, 0.0, -1.0, 2.0};
  const ActionMask mask = ActionMask::legal_only({1, 2});
  const auto probs = distribution_from_logits(logits, 1.0, mask);
  CHECK(probs[0] == 0.0);
  CHECK(probs[3] == 0.0);
  CHECK(probs[1] + probs[2] == doctest::Approx(1.0));
  CHECK(probs[1] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))));
  const auto g = logprob_gradient_from_probs(probs, 1, 1.0, mask);
  CHECK(g[0] == 0.0);
  CHECK(g[3] == 0.0);
  CHECK(thrown_kind([&] { logprob_gradient_from_probs(probs, 0, 1.0, mask); }) ==
        ErrorKind::kZeroProbabilityAction);
  CHECK(thrown_kind([&] {
          distribution_from_logits(logits, 1.0, ActionMask::legal_only({}));
        }) == ErrorKind::kEmptyLegalSet);
}

TEST_CASE("temperature sharpens and sampling follows the CDF") {
  const std::vector<double> logits = {1.0, 2.0, 0.0};
  const auto cold = distribution_from_logits(logits, 0.25, ActionMask::full());
  const auto warm = distribution_from_logits(logits, 1.0, ActionMask::full());
  CHECK(cold[1] > warm[1]);
  CHECK(entropy(cold) < entropy(warm));
  const std::vector<double> probs = {0.2, 0.5, 0.3};
  CHECK(sample_index(probs, 0.0) == 0);
  CHECK(sample_index(probs, 0.19999) == 0);
  CHECK(sample_index(probs, 0.2) == 1);
  CHECK(sample_index(probs, 0.75) == 2);
  CHECK(sample_index(probs, 0.999999) == 2);
  CHECK(greedy_index(std::vector<double>{0.4, 0.4, 0.2}) == 0);
}

TEST_CASE("policy JSON round trip is exact") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  PolicyParams params;
  params.register_game(GameId::kTicTacToe);
  params.register_game(GameId::kKuhnPoker);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GameState s = reset(seed % 2 ? GameId::kTicTacToe : GameId::kKuhnPoker, seed);
    auto& v = params.materialize(observe(s, Role::kPlayer0).canonical(), s.game);
    for (double& x : v) x = normal(gen) * 1e3 + 1e-300;
  }
  const std::string text = policy_to_json(params).dump();
  const PolicyParams back = policy_from_json(nlohmann::json::parse(text));
  CHECK(back == params);
  CHECK(content_hash(back) == content_hash(params));
  CHECK(snapshot(params).hash() == content_hash(params));

  auto bad = nlohmann::json::parse(text);
  bad["format_version"] = 99;
  CHECK(thrown_kind([&] { policy_from_json(bad); }) == ErrorKind::kFormat);
}

TEST_CASE("content hash sees every logit bit") {
  const std::string key = observe(reset(GameId::kTicTacToe, 0), Role::kPlayer0).canonical();
  PolicyParams a;
  a.materialize(key, GameId::kTicTacToe)[4] = 0.5;
  PolicyParams b = a;
  CHECK(content_hash(a) == content_hash(b));
  b.materialize(key, GameId::kTicTacToe)[4] =
      std::nextafter(0.5, 1.0);
  CHECK(content_hash(a) != content_hash(b));
}
