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

#ifndef SELFPLAY_LEARNER_HPP_
#define SELFPLAY_LEARNER_HPP_

// Policy-gradient learner: advantage-weighted REINFORCE gradients, the
// clipped-ratio surrogate used for the inner proximal epochs, global norm
// clipping and an AdamW optimizer over sparse tabular entries.
//
// Gradients here are ascent directions on the expected return. Per-turn
// terms are summed within a trajectory (never divided by its length) and
// averaged over the trajectories of the batch.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "selfplay/policy.hpp"
#include "selfplay/trajectory.hpp"

namespace selfplay {

// Advantage of each role for one trajectory, indexed by role.
using RoleAdvantages = std::array<double, 2>;

class GradientAccumulator {
 public:
  using Entries = std::map<std::string, std::vector<double>>;

  void add(const std::string& key, std::span<const double> grad, double scale);
  void scale(double factor);

  // Euclidean norm over every stored component, computed on read.
  double global_norm() const;
  bool all_finite() const;

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  Entries entries_;
};

// sum_tau sum_t A_{role(t)}(tau) * grad log pi(a_t | key_t) / |batch|,
// over policy turns only. Throws kMissingAdvantage when the advantage list
// does not match the batch, kSnapshotMismatch when `check_logprobs` is set
// and a recorded logprob differs from `params` by more than 1e-9.
GradientAccumulator accumulate_reinforce(std::span<const Trajectory> batch,
                                         std::span<const RoleAdvantages> advantages,
                                         const PolicyParams& params,
                                         bool check_logprobs = true);

enum class OptimizerKind { kAdam, kPlainGradient };

std::string_view optimizer_name(OptimizerKind kind);
std::optional<OptimizerKind> parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  double max_grad_norm = 1.0;  // infinity disables clipping
};

struct OptimizerState {
  struct Moments {
    std::vector<double> first;
    std::vector<double> second;
    friend bool operator==(const Moments&, const Moments&) = default;
  };
  std::map<std::string, Moments> moments;  // touched entries only
  std::int64_t step = 0;

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

struct LearnerConfig {
  OptimizerConfig optimizer;
  int inner_epochs = 2;
  double clip_eps = 0.2;  // infinity disables ratio clipping
  // Present for completeness; only 0 is supported.
  double kl_loss_coef = 0.0;
  double kl_penalty_coef = 0.0;
};

struct TrainStepReport {
  double gradient_norm_pre_clip = 0.0;  // first (on-policy) epoch
  bool clipped = false;                 // norm clipping fired in any epoch
  double mean_entropy = 0.0;            // over policy turns of the batch
  double ratio_clip_fraction = 0.0;     // clipped turns / evaluated turns
  std::map<std::pair<GameId, Role>, double> mean_advantage;
  int optimizer_steps = 0;
};

// Gradient of the clipped surrogate
//   J = 1/|B| sum_tau sum_t min(r_t A, clip(r_t, 1-eps, 1+eps) A),
// r_t = pi_params(a_t) / exp(recorded logprob). Counts clipped turns.
GradientAccumulator surrogate_gradient(std::span<const Trajectory> batch,
                                       std::span<const RoleAdvantages> advantages,
                                       const PolicyParams& params, double clip_eps,
                                       int* clipped_turns = nullptr,
                                       int* evaluated_turns = nullptr);

double surrogate_objective(std::span<const Trajectory> batch,
                           std::span<const RoleAdvantages> advantages,
                           const PolicyParams& params, double clip_eps);

// Scales `grad` to `max_norm` if above it. Returns the pre-clip norm.
double clip_global_norm(GradientAccumulator& grad, double max_norm, bool* clipped);

// One optimizer update along the ascent direction `grad`. Only entries
// present in `grad` move. A zero gradient is a no-op (the step counter does
// not advance).
void apply_update(PolicyParams& params, OptimizerState& state,
                  const GradientAccumulator& grad, const OptimizerConfig& config);

struct ProximalResult {
  PolicyParams params;
  OptimizerState optimizer;
  TrainStepReport report;
};

// Runs `inner_epochs` clipped-surrogate epochs against the batch's recorded
// logprobs. Epoch 1 is on-policy, so its gradient is the REINFORCE gradient.
// Throws kNonFiniteGradient; inputs are untouched in that case.
ProximalResult proximal_step(const PolicyParams& params,
                             std::span<const Trajectory> batch,
                             std::span<const RoleAdvantages> advantages,
                             const LearnerConfig& config,
                             const OptimizerState& optimizer);

nlohmann::json optimizer_to_json(const OptimizerState& state);
OptimizerState optimizer_from_json(const nlohmann::json& doc);

}  // namespace selfplay

#endif  // SELFPLAY_LEARNER_HPP_
