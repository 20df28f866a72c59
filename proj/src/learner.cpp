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

#include "selfplay/learner.hpp"

#include <cmath>
#include <limits>

#include "selfplay/error.hpp"

namespace selfplay {

namespace {

GameId key_game(const std::string& key) {
  const auto obs = parse_observation_key(key);
  if (!obs) throw Error(ErrorKind::kFormat, "malformed observation key " + key);
  return obs->game;
}

std::vector<double> turn_distribution(const PolicyParams& params, GameId game,
                                      const TurnRecord& turn) {
  const ActionMask mask = turn.mask();
  if (const auto* logits = params.find(turn.obs_key)) {
    return distribution_from_logits(*logits, turn.temperature, mask);
  }
  const std::vector<double> zeros(alphabet(game).size(), 0.0);
  return distribution_from_logits(zeros, turn.temperature, mask);
}

void check_advantages(std::span<const Trajectory> batch,
                      std::span<const RoleAdvantages> advantages) {
  if (advantages.size() != batch.size()) {
    throw Error(ErrorKind::kMissingAdvantage,
                std::to_string(advantages.size()) + " advantage rows for " +
                    std::to_string(batch.size()) + " trajectories");
  }
  for (const auto& a : advantages) {
    if (!std::isfinite(a[0]) || !std::isfinite(a[1])) {
      throw Error(ErrorKind::kMissingAdvantage, "non-finite advantage");
    }
  }
}

}  // namespace

void GradientAccumulator::add(const std::string& key, std::span<const double> grad,
                              double scale) {
  auto [it, inserted] = entries_.try_emplace(key);
  if (inserted) it->second.assign(grad.size(), 0.0);
  auto& dst = it->second;
  for (std::size_t i = 0; i < grad.size(); ++i) dst[i] += scale * grad[i];
}

void GradientAccumulator::scale(double factor) {
  for (auto& [key, v] : entries_) {
    for (double& x : v) x *= factor;
  }
}

double GradientAccumulator::global_norm() const {
  double sq = 0.0;
  for (const auto& [key, v] : entries_) {
    for (double x : v) sq += x * x;
  }
  return std::sqrt(sq);
}

bool GradientAccumulator::all_finite() const {
  for (const auto& [key, v] : entries_) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

GradientAccumulator accumulate_reinforce(std::span<const Trajectory> batch,
                                         std::span<const RoleAdvantages> advantages,
                                         const PolicyParams& params,
                                         bool check_logprobs) {
  check_advantages(batch, advantages);
  GradientAccumulator acc;
  if (batch.empty()) return acc;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& tr = batch[i];
    for (const auto& turn : tr.turns) {
      if (!turn.policy_turn) continue;
      const double adv = advantages[i][index(turn.role)];
      if (!check_logprobs && adv == 0.0) continue;
      const auto probs = turn_distribution(params, tr.game, turn);
      if (check_logprobs &&
          !(std::abs(std::log(probs[turn.action]) - turn.logprob) <= 1e-9)) {
        throw Error(ErrorKind::kSnapshotMismatch,
                    "recorded logprob differs at " + turn.obs_key);
      }
      if (adv == 0.0) continue;
      const auto grad = logprob_gradient_from_probs(probs, turn.action,
                                                    turn.temperature, turn.mask());
      acc.add(turn.obs_key, grad, adv * inv_n);
    }
  }
  return acc;
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

std::optional<OptimizerKind> parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kPlainGradient;
  return std::nullopt;
}

GradientAccumulator surrogate_gradient(std::span<const Trajectory> batch,
                                       std::span<const RoleAdvantages> advantages,
                                       const PolicyParams& params, double clip_eps,
                                       int* clipped_turns, int* evaluated_turns) {
  check_advantages(batch, advantages);
  GradientAccumulator acc;
  int clipped = 0;
  int evaluated = 0;
  const double inv_n = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& tr = batch[i];
    for (const auto& turn : tr.turns) {
      if (!turn.policy_turn) continue;
      const double adv = advantages[i][index(turn.role)];
      ++evaluated;
      if (adv == 0.0) continue;
      const auto probs = turn_distribution(params, tr.game, turn);
      // A later epoch can drive the taken action's probability to zero; the
      // ratio and its gradient both vanish there.
      if (probs[turn.action] == 0.0) continue;
      const double ratio = std::exp(std::log(probs[turn.action]) - turn.logprob);
      // The min() picks the clipped branch, whose gradient is zero.
      if ((adv > 0.0 && ratio > 1.0 + clip_eps) ||
          (adv < 0.0 && ratio < 1.0 - clip_eps)) {
        ++clipped;
        continue;
      }
      const auto grad = logprob_gradient_from_probs(probs, turn.action,
                                                    turn.temperature, turn.mask());
      acc.add(turn.obs_key, grad, adv * ratio * inv_n);
    }
  }
  if (clipped_turns) *clipped_turns = clipped;
  if (evaluated_turns) *evaluated_turns = evaluated;
  return acc;
}

double surrogate_objective(std::span<const Trajectory> batch,
                           std::span<const RoleAdvantages> advantages,
                           const PolicyParams& params, double clip_eps) {
  check_advantages(batch, advantages);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& tr = batch[i];
    for (const auto& turn : tr.turns) {
      if (!turn.policy_turn) continue;
      const double adv = advantages[i][index(turn.role)];
      const auto probs = turn_distribution(params, tr.game, turn);
      const double ratio = std::exp(std::log(probs[turn.action]) - turn.logprob);
      const double clipped_ratio =
          std::min(std::max(ratio, 1.0 - clip_eps), 1.0 + clip_eps);
      total += std::min(ratio * adv, clipped_ratio * adv);
    }
  }
  return batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
}

double clip_global_norm(GradientAccumulator& grad, double max_norm, bool* clipped) {
  const double norm = grad.global_norm();
  const bool fire = norm > max_norm;
  if (fire) grad.scale(max_norm / norm);
  if (clipped) *clipped = fire;
  return norm;
}

void apply_update(PolicyParams& params, OptimizerState& state,
                  const GradientAccumulator& grad, const OptimizerConfig& config) {
  if (grad.global_norm() == 0.0) return;
  state.step += 1;
  const double lr = config.learning_rate;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (const auto& [key, g] : grad.entries()) {
    auto& theta = params.materialize(key, key_game(key));
    if (config.kind == OptimizerKind::kPlainGradient) {
      for (std::size_t i = 0; i < g.size(); ++i) theta[i] += lr * g[i];
      continue;
    }
    auto& m = state.moments[key];
    if (m.first.empty()) {
      m.first.assign(g.size(), 0.0);
      m.second.assign(g.size(), 0.0);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      // Descent on the loss -J.
      const double loss_grad = -g[i];
      m.first[i] = config.beta1 * m.first[i] + (1.0 - config.beta1) * loss_grad;
      m.second[i] =
          config.beta2 * m.second[i] + (1.0 - config.beta2) * loss_grad * loss_grad;
      const double m_hat = m.first[i] / bc1;
      const double v_hat = m.second[i] / bc2;
      theta[i] -= lr * config.weight_decay * theta[i];
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

ProximalResult proximal_step(const PolicyParams& params,
                             std::span<const Trajectory> batch,
                             std::span<const RoleAdvantages> advantages,
                             const LearnerConfig& config,
                             const OptimizerState& optimizer) {
  if (config.kl_loss_coef != 0.0 || config.kl_penalty_coef != 0.0) {
    throw Error(ErrorKind::kConfig, "KL coefficients other than 0 are not supported");
  }
  if (config.inner_epochs < 1) {
    throw Error(ErrorKind::kConfig, "inner_epochs must be >= 1");
  }
  check_advantages(batch, advantages);
  ProximalResult result{params, optimizer, {}};
  auto& report = result.report;

  double entropy_sum = 0.0;
  int policy_turns = 0;
  std::map<std::pair<GameId, Role>, std::pair<double, int>> adv_sums;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (const auto& turn : batch[i].turns) {
      if (!turn.policy_turn) continue;
      entropy_sum += turn.entropy;
      ++policy_turns;
    }
    for (Role r : {Role::kPlayer0, Role::kPlayer1}) {
      auto& s = adv_sums[{batch[i].game, r}];
      s.first += advantages[i][index(r)];
      s.second += 1;
    }
  }
  report.mean_entropy = policy_turns ? entropy_sum / policy_turns : 0.0;
  for (const auto& [key, s] : adv_sums) report.mean_advantage[key] = s.first / s.second;

  int clipped_total = 0;
  int evaluated_total = 0;
  for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
    int clipped = 0;
    int evaluated = 0;
    auto grad = surrogate_gradient(batch, advantages, result.params, config.clip_eps,
                                   &clipped, &evaluated);
    clipped_total += clipped;
    evaluated_total += evaluated;
    if (!grad.all_finite()) {
      throw Error(ErrorKind::kNonFiniteGradient,
                  "epoch " + std::to_string(epoch + 1));
    }
    bool norm_clipped = false;
    const double norm =
        clip_global_norm(grad, config.optimizer.max_grad_norm, &norm_clipped);
    if (epoch == 0) report.gradient_norm_pre_clip = norm;
    report.clipped = report.clipped || norm_clipped;
    if (norm > 0.0) report.optimizer_steps += 1;
    apply_update(result.params, result.optimizer, grad, config.optimizer);
  }
  report.ratio_clip_fraction =
      evaluated_total ? static_cast<double>(clipped_total) / evaluated_total : 0.0;
  return result;
}

nlohmann::json optimizer_to_json(const OptimizerState& state) {
  nlohmann::json doc;
  doc["step"] = state.step;
  auto moments = nlohmann::json::object();
  for (const auto& [key, m] : state.moments) {
    moments[key] = {{"first", m.first}, {"second", m.second}};
  }
  doc["moments"] = std::move(moments);
  return doc;
}

OptimizerState optimizer_from_json(const nlohmann::json& doc) {
  try {
    OptimizerState state;
    state.step = doc.at("step").get<std::int64_t>();
    for (const auto& [key, m] : doc.at("moments").items()) {
      state.moments[key] = {m.at("first").get<std::vector<double>>(),
                            m.at("second").get<std::vector<double>>()};
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
}

}  // namespace selfplay
