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

#ifndef SELFPLAY_ADVANTAGE_HPP_
#define SELFPLAY_ADVANTAGE_HPP_

// Role-conditioned advantage estimation: one exponential-moving-average
// baseline per (game, role), advantage = return - baseline.

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "selfplay/env.hpp"

namespace selfplay {

inline constexpr double kDefaultBaselineDecay = 0.95;

struct AdvantageRecord {
  GameId game = GameId::kTicTacToe;
  Role role = Role::kPlayer0;
  double return_value = 0.0;
  double advantage = 0.0;
};

struct ReturnSample {
  GameId game = GameId::kTicTacToe;
  Role role = Role::kPlayer0;
  double return_value = 0.0;
};

class BaselineTable {
 public:
  struct Entry {
    double value = 0.0;
    std::int64_t update_count = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  using Key = std::pair<GameId, Role>;

  explicit BaselineTable(double alpha = kDefaultBaselineDecay);

  double alpha() const { return alpha_; }

  // Absent entries read 0.
  double value(GameId game, Role role) const;
  std::int64_t update_count(GameId game, Role role) const;

  // b <- alpha * b + (1 - alpha) * R
  void update(GameId game, Role role, double return_value);

  // R - b; does not touch the table.
  AdvantageRecord advantage(GameId game, Role role, double return_value) const;

  const std::map<Key, Entry>& entries() const { return entries_; }

  // Checkpoint loading only.
  void restore(GameId game, Role role, double value, std::int64_t update_count) {
    entries_[{game, role}] = Entry{value, update_count};
  }

  friend bool operator==(const BaselineTable&, const BaselineTable&) = default;

 private:
  double alpha_;
  std::map<Key, Entry> entries_;
};

// In batch order, for each sample: update the (game, role) baseline, then
// compute the advantage against the updated value.
std::vector<AdvantageRecord> process_batch(BaselineTable& table,
                                           std::span<const ReturnSample> batch);

// Steady-state standard deviation of an EMA fed i.i.d. returns:
// sqrt((1 - alpha) / (1 + alpha) * variance).
double ema_stationary_stddev(double alpha, double return_variance);

nlohmann::json baselines_to_json(const BaselineTable& table);
BaselineTable baselines_from_json(const nlohmann::json& doc);

}  // namespace selfplay

#endif  // SELFPLAY_ADVANTAGE_HPP_
