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

#include "selfplay/trajectory.hpp"

#include <cmath>
#include <fstream>

#include "selfplay/error.hpp"

namespace selfplay {

nlohmann::json options_to_json(GameId game, const GameOptions& o) {
  nlohmann::json doc = nlohmann::json::object();
  switch (game) {
    case GameId::kKuhnPoker:
      doc["kuhn_rounds"] = o.kuhn_rounds;
      doc["kuhn_key_round"] = o.kuhn_key_round;
      doc["kuhn_key_chip_bucket"] = o.kuhn_key_chip_bucket;
      break;
    case GameId::kPigDice:
      doc["pig_target"] = o.pig_target;
      break;
    case GameId::kFixedHorizon:
      doc["horizon_length"] = o.horizon_length;
      doc["horizon_legal"] = o.horizon_legal;
      break;
    default:
      break;
  }
  return doc;
}

GameOptions options_from_json(GameId, const nlohmann::json& doc) {
  GameOptions o;
  o.kuhn_rounds = doc.value("kuhn_rounds", o.kuhn_rounds);
  o.kuhn_key_round = doc.value("kuhn_key_round", o.kuhn_key_round);
  o.kuhn_key_chip_bucket = doc.value("kuhn_key_chip_bucket", o.kuhn_key_chip_bucket);
  o.pig_target = doc.value("pig_target", o.pig_target);
  o.horizon_length = doc.value("horizon_length", o.horizon_length);
  o.horizon_legal = doc.value("horizon_legal", o.horizon_legal);
  return o;
}

nlohmann::json trajectory_to_json(const Trajectory& tr) {
  nlohmann::json doc;
  doc["game"] = game_name(tr.game);
  doc["seed"] = tr.seed;
  doc["options"] = options_to_json(tr.game, tr.options);
  auto turns = nlohmann::json::array();
  for (const auto& turn : tr.turns) {
    nlohmann::json j;
    j["t"] = turn.t;
    j["role"] = index(turn.role);
    j["obs_key"] = turn.obs_key;
    j["action"] = action_name(ActionToken{tr.game, turn.action});
    j["legal"] = turn.legal;
    j["policy"] = turn.policy_turn;
    if (std::isnan(turn.logprob)) {
      j["logprob"] = nullptr;
    } else {
      j["logprob"] = turn.logprob;
    }
    if (turn.policy_turn) {
      j["temperature"] = turn.temperature;
      j["mask"] = mask_mode_name(turn.mask_mode);
    }
    turns.push_back(std::move(j));
  }
  doc["turns"] = std::move(turns);
  doc["rho"] = tr.returns[0];
  doc["reason"] = reason_name(tr.reason);
  if (tr.learner_role) {
    doc["learner_role"] = index(*tr.learner_role);
  } else {
    doc["learner_role"] = nullptr;
  }
  return doc;
}

Trajectory trajectory_from_json(const nlohmann::json& doc) {
  try {
    Trajectory tr;
    const auto game = parse_game(doc.at("game").get<std::string>());
    if (!game) throw Error(ErrorKind::kFormat, "unknown game");
    tr.game = *game;
    tr.seed = doc.at("seed").get<std::uint64_t>();
    tr.options = options_from_json(tr.game, doc.value("options", nlohmann::json::object()));
    for (const auto& j : doc.at("turns")) {
      TurnRecord turn;
      turn.t = j.at("t").get<int>();
      const int role = j.at("role").get<int>();
      if (role != 0 && role != 1) throw Error(ErrorKind::kFormat, "bad role");
      turn.role = static_cast<Role>(role);
      turn.obs_key = j.at("obs_key").get<std::string>();
      const auto action = parse_action(tr.game, j.at("action").get<std::string>());
      if (!action) throw Error(ErrorKind::kFormat, "unknown action symbol");
      turn.action = action->index;
      turn.legal = j.at("legal").get<bool>();
      turn.policy_turn = j.value("policy", true);
      const auto& lp = j.at("logprob");
      turn.logprob = lp.is_null() ? kOpponentLogprob : lp.get<double>();
      turn.temperature = j.value("temperature", 1.0);
      const auto mask = parse_mask_mode(j.value("mask", std::string("full")));
      if (!mask) throw Error(ErrorKind::kFormat, "unknown mask mode");
      turn.mask_mode = *mask;
      tr.turns.push_back(std::move(turn));
    }
    const int rho = doc.at("rho").get<int>();
    tr.returns = {rho, -rho};
    const auto reason = parse_reason(doc.at("reason").get<std::string>());
    if (!reason) throw Error(ErrorKind::kFormat, "unknown reason");
    tr.reason = *reason;
    if (doc.contains("learner_role") && !doc["learner_role"].is_null()) {
      tr.learner_role = static_cast<Role>(doc["learner_role"].get<int>());
    }
    return tr;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
}

std::string to_jsonl(std::span<const Trajectory> trajectories) {
  std::string out;
  for (const auto& tr : trajectories) {
    out += trajectory_to_json(tr).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path,
                 std::span<const Trajectory> trajectories) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file << to_jsonl(trajectories);
}

std::vector<Trajectory> read_jsonl(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(trajectory_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kFormat, e.what());
    }
  }
  return out;
}

}  // namespace selfplay
