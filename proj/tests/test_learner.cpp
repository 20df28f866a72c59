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
#include <limits>
#include <random>

#include "doctest.h"
#include "selfplay/agents.hpp"
#include "selfplay/learner.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::thrown_kind;

namespace {

GameOptions one_round() {
  GameOptions o;
  o.kuhn_rounds = 1;
  return o;
}

// Shared self-play batch under `params` with recorded logprobs.
std::vector<Trajectory> kuhn_batch(const PolicyParams& params, int n, MaskMode mask) {
  const PolicyAgent agent(snapshot(params), {1.0, mask, false, true});
  std::vector<Trajectory> batch;
  for (int i = 0; i < n; ++i) {
    batch.push_back(play_game(GameId::kKuhnPoker, one_round(), derive_seed(123, i),
                              {&agent, &agent}));
  }
  return batch;
}

std::vector<RoleAdvantages> random_advantages(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<RoleAdvantages> out(n);
  for (auto& a : out) a = {u(gen), u(gen)};
  return out;
}

PolicyParams perturbed(const std::vector<Trajectory>& batch, double scale,
                       std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, scale);
  PolicyParams p;
  for (const auto& tr : batch) {
    for (const auto& turn : tr.turns) {
      auto& v = p.materialize(turn.obs_key, tr.game);
      if (v[0] == 0.0) {
        for (double& x : v) x = normal(gen);
      }
    }
  }
  return p;
}

}  // namespace

TEST_CASE("on-policy surrogate gradient equals the REINFORCE gradient") {
  const PolicyParams params;
  const auto batch = kuhn_batch(params, 64, MaskMode::kFullAlphabet);
  const auto adv = random_advantages(batch.size(), 1);
  const auto reinforce = accumulate_reinforce(batch, adv, params);
  const auto surrogate = surrogate_gradient(batch, adv, params, 0.2);
  REQUIRE(reinforce.entries().size() == surrogate.entries().size());
  for (const auto& [key, g] : reinforce.entries()) {
    const auto& s = surrogate.entries().at(key);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(s[i] == doctest::Approx(g[i]));
  }
}

TEST_CASE("surrogate gradient matches finite differences of the objective") {
  for (MaskMode mask : {MaskMode::kFullAlphabet, MaskMode::kLegalOnly}) {
    const auto batch = kuhn_batch(PolicyParams{}, 48, mask);
    const auto adv = random_advantages(batch.size(), 2);
    const PolicyParams params = perturbed(batch, 0.1, 3);
    for (double eps : {0.2, std::numeric_limits<double>::infinity()}) {
      const auto grad = surrogate_gradient(batch, adv, params, eps);
      const double h = 1e-6;
      for (const auto& [key, logits] : params.entries()) {
        for (std::size_t i = 0; i < logits.size(); ++i) {
          PolicyParams up = params, down = params;
          up.materialize(key, GameId::kKuhnPoker)[i] += h;
          down.materialize(key, GameId::kKuhnPoker)[i] -= h;
          const double fd = (surrogate_objective(batch, adv, up, eps) -
                             surrogate_objective(batch, adv, down, eps)) /
                            (2 * h);
          const auto it = grad.entries().find(key);
          const double g = it == grad.entries().end() ? 0.0 : it->second[i];
          REQUIRE(std::abs(fd - g) <= 1e-5 * std::max(1.0, std::abs(g)));
        }
      }
    }
  }
}

TEST_CASE("ratio clipping zeroes gradients outside the trust region") {
  const auto batch = kuhn_batch(PolicyParams{}, 64, MaskMode::kFullAlphabet);
  std::vector<RoleAdvantages> adv(batch.size(), RoleAdvantages{1.0, 1.0});
  const PolicyParams far = perturbed(batch, 3.0, 4);
  int clipped = 0, evaluated = 0;
  surrogate_gradient(batch, adv, far, 0.2, &clipped, &evaluated);
  CHECK(evaluated > 0);
  CHECK(clipped > 0);
  int none = -1;
  surrogate_gradient(batch, adv, PolicyParams{}, 0.2, &none, &evaluated);
  CHECK(none == 0);
}

TEST_CASE("global norm clipping") {
  GradientAccumulator g;
  const std::vector<double> v = {3.0, 4.0};
  g.add("k", v, 1.0);
  bool clipped = false;
  CHECK(clip_global_norm(g, 1.0, &clipped) == doctest::Approx(5.0));
  CHECK(clipped);
  CHECK(g.global_norm() == doctest::Approx(1.0));
  CHECK(g.entries().at("k")[0] == doctest::Approx(0.6));
  clipped = true;
  CHECK(clip_global_norm(g, 2.0, &clipped) == doctest::Approx(1.0));
  CHECK_FALSE(clipped);
  CHECK(clip_global_norm(g, std::numeric_limits<double>::infinity(), &clipped) ==
        doctest::Approx(1.0));
  CHECK_FALSE(clipped);
}

TEST_CASE("adam first step moves each touched logit by the learning rate") {
  const std::string key = observe(reset(GameId::kKuhnPoker, 0), Role::kPlayer0).canonical();
  PolicyParams params;
  OptimizerState state;
  GradientAccumulator g;
  const std::vector<double> v = {0.5, -2.0, 0.0, 1e-3};
  g.add(key, v, 1.0);
  OptimizerConfig cfg;
  cfg.learning_rate = 0.01;
  apply_update(params, state, g, cfg);
  const auto& p = *params.find(key);
  CHECK(p[0] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(-0.01).epsilon(1e-6));
  CHECK(p[2] == 0.0);
  CHECK(p[3] == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(state.step == 1);
}

TEST_CASE("zero gradient is a no-op") {
  const std::string key = observe(reset(GameId::kKuhnPoker, 0), Role::kPlayer0).canonical();
  PolicyParams params;
  params.materialize(key, GameId::kKuhnPoker) = {0.1, 0.2, 0.3, 0.4};
  OptimizerState state;
  const PolicyParams before = params;
  apply_update(params, state, GradientAccumulator{}, OptimizerConfig{});
  CHECK(params == before);
  CHECK(state.step == 0);
  GradientAccumulator zero;
  const std::vector<double> v(4, 0.0);
  zero.add(key, v, 1.0);
  apply_update(params, state, zero, OptimizerConfig{});
  CHECK(params == before);
  CHECK(state.step == 0);
}

TEST_CASE("non-finite inputs abort the step and leave inputs untouched") {
  const PolicyParams params;
  const auto batch = kuhn_batch(params, 8, MaskMode::kFullAlphabet);
  auto adv = random_advantages(batch.size(), 6);
  const OptimizerState opt;
  PolicyParams broken = perturbed(batch, 0.1, 10);
  const std::string key = batch[0].turns[0].obs_key;
  broken.materialize(key, GameId::kKuhnPoker)[batch[0].turns[0].action] =
      std::numeric_limits<double>::infinity();
  const PolicyParams before = broken;
  CHECK(thrown_kind([&] { proximal_step(broken, batch, adv, LearnerConfig{}, opt); }) ==
        ErrorKind::kNonFiniteGradient);
  CHECK(broken == before);
  adv[3][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK(thrown_kind([&] { proximal_step(params, batch, adv, LearnerConfig{}, opt); }) ==
        ErrorKind::kMissingAdvantage);
}

TEST_CASE("proximal step reports and applies the configured epochs") {
  const PolicyParams params;
  const auto batch = kuhn_batch(params, 64, MaskMode::kFullAlphabet);
  const auto adv = random_advantages(batch.size(), 7);
  LearnerConfig cfg;
  const auto result = proximal_step(params, batch, adv, cfg, OptimizerState{});
  CHECK(result.report.optimizer_steps == 2);
  CHECK(result.optimizer.step == 2);
  const auto direct = accumulate_reinforce(batch, adv, params);
  CHECK(result.report.gradient_norm_pre_clip == doctest::Approx(direct.global_norm()));
  CHECK(result.report.mean_entropy == doctest::Approx(std::log(4.0)));
  CHECK(result.params.size() > 0);
}

TEST_CASE("mismatched inputs are rejected") {
  const PolicyParams params;
  const auto batch = kuhn_batch(params, 4, MaskMode::kFullAlphabet);
  const auto adv = random_advantages(3, 8);
  CHECK(thrown_kind([&] { accumulate_reinforce(batch, adv, params); }) ==
        ErrorKind::kMissingAdvantage);
  const PolicyParams other = perturbed(batch, 1.0, 9);
  const auto adv4 = random_advantages(4, 8);
  CHECK(thrown_kind([&] { accumulate_reinforce(batch, adv4, other); }) ==
        ErrorKind::kSnapshotMismatch);
}

TEST_CASE("optimizer state JSON round trip") {
  OptimizerState s;
  s.step = 7;
  s.moments["a"] = {{0.1, 1e-300}, {2.5, 0.0}};
  CHECK(optimizer_from_json(nlohmann::json::parse(optimizer_to_json(s).dump())) == s);
}
