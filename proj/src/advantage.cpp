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

#include "selfplay/advantage.hpp"

#include <cmath>

#include "selfplay/error.hpp"

namespace selfplay {

BaselineTable::BaselineTable(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::kConfig, "baseline decay must lie in [0, 1]");
  }
}

double BaselineTable::value(GameId game, Role role) const {
  const auto it = entries_.find({game, role});
  return it == entries_.end() ? 0.0 : it->second.value;
}

std::int64_t BaselineTable::update_count(GameId game, Role role) const {
  const auto it = entries_.find({game, role});
  return it == entries_.end() ? 0 : it->second.update_count;
}

void BaselineTable::update(GameId game, Role role, double return_value) {
  auto& e = entries_[{game, role}];
  e.value = alpha_ * e.value + (1.0 - alpha_) * return_value;
  e.update_count += 1;
}

AdvantageRecord BaselineTable::advantage(GameId game, Role role,
                                         double return_value) const {
  return AdvantageRecord{game, role, return_value,
                         return_value - value(game, role)};
}

std::vector<AdvantageRecord> process_batch(BaselineTable& table,
                                           std::span<const ReturnSample> batch) {
  std::vector<AdvantageRecord> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    table.update(s.game, s.role, s.return_value);
    out.push_back(table.advantage(s.game, s.role, s.return_value));
  }
  return out;
}

double ema_stationary_stddev(double alpha, double return_variance) {
  return std::sqrt((1.0 - alpha) / (1.0 + alpha) * return_variance);
}

nlohmann::json baselines_to_json(const BaselineTable& table) {
  nlohmann::json doc;
  doc["alpha"] = table.alpha();
  auto entries = nlohmann::json::array();
  for (const auto& [key, e] : table.entries()) {
    entries.push_back({{"game", game_name(key.first)},
                       {"role", index(key.second)},
                       {"value", e.value},
                       {"updates", e.update_count}});
  }
  doc["entries"] = std::move(entries);
  return doc;
}

BaselineTable baselines_from_json(const nlohmann::json& doc) {
  try {
    BaselineTable table(doc.at("alpha").get<double>());
    for (const auto& e : doc.at("entries")) {
      const auto game = parse_game(e.at("game").get<std::string>());
      const int role = e.at("role").get<int>();
      if (!game || (role != 0 && role != 1)) {
        throw Error(ErrorKind::kFormat, "bad baseline entry");
      }
      table.restore(*game, static_cast<Role>(role), e.at("value").get<double>(),
                    e.at("updates").get<std::int64_t>());
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
}

}  // namespace selfplay
