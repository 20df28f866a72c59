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

#ifndef SELFPLAY_POLICY_HPP_
#define SELFPLAY_POLICY_HPP_

// Tabular role-conditioned softmax policy.
//
// One logit vector per canonical observation key, sized to the game's full
// alphabet. Keys that were never updated read as all-zero logits, i.e. the
// uniform distribution; entries only materialize when the learner writes.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfplay/env.hpp"

namespace selfplay {

enum class MaskMode { kFullAlphabet, kLegalOnly };

std::string_view mask_mode_name(MaskMode mode);
std::optional<MaskMode> parse_mask_mode(std::string_view name);

struct ActionMask {
  MaskMode mode = MaskMode::kFullAlphabet;
  std::vector<int> legal;  // ascending; consulted only in kLegalOnly

  static ActionMask full() { return {}; }
  static ActionMask legal_only(std::vector<int> legal_actions) {
    return {MaskMode::kLegalOnly, std::move(legal_actions)};
  }
  bool allows(int action) const;
};

struct ActionSample {
  ActionToken action;
  double logprob = 0.0;
  double entropy = 0.0;  // nats, of the distribution sampled from
};

class PolicyParams {
 public:
  static constexpr int kFormatVersion = 1;

  using Table = std::map<std::string, std::vector<double>>;

  // nullptr when the key was never materialized.
  const std::vector<double>* find(const std::string& canonical_key) const;

  // Logits for `obs`, all zero when absent.
  std::vector<double> logits(const ObservationKey& obs) const;

  // Creates a zero entry on first use.
  std::vector<double>& materialize(const std::string& canonical_key, GameId game);

  const Table& entries() const { return table_; }
  std::size_t size() const { return table_.size(); }

  // Games this policy is declared for (listed in checkpoint headers).
  void register_game(GameId game) { games_.insert(game); }
  const std::set<GameId>& games() const { return games_; }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  Table table_;
  std::set<GameId> games_;
};

// softmax(logits / temperature) restricted to the mask. Throws
// kEmptyLegalSet when the mask admits nothing.
std::vector<double> distribution_from_logits(std::span<const double> logits,
                                             double temperature,
                                             const ActionMask& mask);

std::vector<double> action_distribution(const PolicyParams& params,
                                        const ObservationKey& obs,
                                        double temperature, const ActionMask& mask);

double entropy(std::span<const double> probs);

// Inverse-CDF pick in alphabet order; `draw` in [0, 1).
int sample_index(std::span<const double> probs, double draw);

// Highest-probability action, lowest index on ties.
int greedy_index(std::span<const double> probs);

ActionSample sample(const PolicyParams& params, const ObservationKey& obs,
                    double temperature, const ActionMask& mask, double draw);

// d log pi(action) / d logits for the key of `obs`: (1[a = action] - p_a) / T
// inside the mask, 0 outside. Throws kZeroProbabilityAction, or
// kNonFiniteGradient when the distribution is NaN.
std::vector<double> logprob_gradient(const PolicyParams& params,
                                     const ObservationKey& obs, int action,
                                     double temperature, const ActionMask& mask);

std::vector<double> logprob_gradient_from_probs(std::span<const double> probs,
                                                int action, double temperature,
                                                const ActionMask& mask);

// Read-only view shared by actors during a collection phase.
class PolicySnapshot {
 public:
  PolicySnapshot();
  explicit PolicySnapshot(PolicyParams params);

  const PolicyParams& params() const { return *params_; }
  std::uint64_t hash() const { return hash_; }

 private:
  std::shared_ptr<const PolicyParams> params_;
  std::uint64_t hash_ = 0;
};

PolicySnapshot snapshot(const PolicyParams& params);

// FNV-1a over keys and the bit patterns of every logit.
std::uint64_t content_hash(const PolicyParams& params);

// Versioned header (format, key grammar, games with alphabet order) plus
// entries. Doubles are written shortest-round-trip, so load(save(p)) == p.
nlohmann::json policy_to_json(const PolicyParams& params);
PolicyParams policy_from_json(const nlohmann::json& doc);

// One line per key: "<key>\t<logit> <logit> ...", %.17g.
std::string export_text(const PolicyParams& params);

}  // namespace selfplay

#endif  // SELFPLAY_POLICY_HPP_
