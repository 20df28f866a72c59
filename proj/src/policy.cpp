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

#include "selfplay/policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "selfplay/error.hpp"
#include "selfplay/rng.hpp"

namespace selfplay {

std::string_view mask_mode_name(MaskMode mode) {
  return mode == MaskMode::kFullAlphabet ? "full" : "legal";
}

std::optional<MaskMode> parse_mask_mode(std::string_view name) {
  if (name == "full") return MaskMode::kFullAlphabet;
  if (name == "legal") return MaskMode::kLegalOnly;
  return std::nullopt;
}

bool ActionMask::allows(int action) const {
  if (mode == MaskMode::kFullAlphabet) return true;
  return std::binary_search(legal.begin(), legal.end(), action);
}

const std::vector<double>* PolicyParams::find(const std::string& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<double> PolicyParams::logits(const ObservationKey& obs) const {
  if (const auto* entry = find(obs.canonical())) return *entry;
  return std::vector<double>(alphabet(obs.game).size(), 0.0);
}

std::vector<double>& PolicyParams::materialize(const std::string& key, GameId game) {
  games_.insert(game);
  auto [it, inserted] = table_.try_emplace(key);
  if (inserted) it->second.assign(alphabet(game).size(), 0.0);
  return it->second;
}

std::vector<double> distribution_from_logits(std::span<const double> logits,
                                             double temperature,
                                             const ActionMask& mask) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorKind::kConfig, "temperature must be positive");
  }
  const std::size_t n = logits.size();
  std::vector<double> probs(n, 0.0);
  double peak = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t a = 0; a < n; ++a) {
    if (!mask.allows(static_cast<int>(a))) continue;
    peak = std::max(peak, logits[a] / temperature);
    any = true;
  }
  if (!any) throw Error(ErrorKind::kEmptyLegalSet, "mask admits no action");
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!mask.allows(static_cast<int>(a))) continue;
    probs[a] = std::exp(logits[a] / temperature - peak);
    total += probs[a];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> action_distribution(const PolicyParams& params,
                                        const ObservationKey& obs,
                                        double temperature, const ActionMask& mask) {
  if (const auto* entry = params.find(obs.canonical())) {
    return distribution_from_logits(*entry, temperature, mask);
  }
  const std::vector<double> zeros(alphabet(obs.game).size(), 0.0);
  return distribution_from_logits(zeros, temperature, mask);
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

int sample_index(std::span<const double> probs, double draw) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (probs[a] <= 0.0) continue;
    last_positive = static_cast<int>(a);
    cumulative += probs[a];
    if (draw < cumulative) return last_positive;
  }
  // Rounding left the cumulative sum a hair below `draw`.
  return last_positive;
}

int greedy_index(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

ActionSample sample(const PolicyParams& params, const ObservationKey& obs,
                    double temperature, const ActionMask& mask, double draw) {
  const auto probs = action_distribution(params, obs, temperature, mask);
  const int a = sample_index(probs, draw);
  return ActionSample{ActionToken{obs.game, a}, std::log(probs[a]), entropy(probs)};
}

std::vector<double> logprob_gradient_from_probs(std::span<const double> probs,
                                                int action, double temperature,
                                                const ActionMask& mask) {
  if (action >= 0 && action < static_cast<int>(probs.size()) &&
      std::isnan(probs[action])) {
    throw Error(ErrorKind::kNonFiniteGradient, "non-finite action distribution");
  }
  if (action < 0 || action >= static_cast<int>(probs.size()) ||
      !(probs[action] > 0.0)) {
    throw Error(ErrorKind::kZeroProbabilityAction,
                "action " + std::to_string(action) + " has zero probability");
  }
  std::vector<double> grad(probs.size(), 0.0);
  for (std::size_t a = 0; a < probs.size(); ++a) {
    if (!mask.allows(static_cast<int>(a))) continue;
    const double indicator = static_cast<int>(a) == action ? 1.0 : 0.0;
    grad[a] = (indicator - probs[a]) / temperature;
  }
  return grad;
}

std::vector<double> logprob_gradient(const PolicyParams& params,
                                     const ObservationKey& obs, int action,
                                     double temperature, const ActionMask& mask) {
  const auto probs = action_distribution(params, obs, temperature, mask);
  return logprob_gradient_from_probs(probs, action, temperature, mask);
}

PolicySnapshot::PolicySnapshot() : PolicySnapshot(PolicyParams{}) {}

PolicySnapshot::PolicySnapshot(PolicyParams params)
    : params_(std::make_shared<const PolicyParams>(std::move(params))),
      hash_(content_hash(*params_)) {}

PolicySnapshot snapshot(const PolicyParams& params) { return PolicySnapshot(params); }

std::uint64_t content_hash(const PolicyParams& params) {
  std::uint64_t h = kFnvOffset;
  for (const auto& [key, logits] : params.entries()) {
    fnv_bytes(h, key.data(), key.size());
    const std::uint8_t sep = 0;
    fnv_bytes(h, &sep, 1);
    for (double v : logits) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      fnv_bytes(h, &bits, sizeof bits);
    }
  }
  return h;
}

nlohmann::json policy_to_json(const PolicyParams& params) {
  nlohmann::json doc;
  doc["format_version"] = PolicyParams::kFormatVersion;
  doc["key_grammar_version"] = kKeyGrammarVersion;
  auto games = nlohmann::json::array();
  for (GameId g : params.games()) {
    const auto names = alphabet(g);
    games.push_back({{"name", game_name(g)},
                     {"alphabet", std::vector<std::string>(names.begin(), names.end())}});
  }
  doc["games"] = std::move(games);
  auto entries = nlohmann::json::object();
  for (const auto& [key, logits] : params.entries()) entries[key] = logits;
  doc["entries"] = std::move(entries);
  return doc;
}

PolicyParams policy_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != PolicyParams::kFormatVersion) {
      throw Error(ErrorKind::kFormat, "unsupported policy format version");
    }
    if (doc.at("key_grammar_version").get<int>() != kKeyGrammarVersion) {
      throw Error(ErrorKind::kFormat, "unsupported observation key grammar");
    }
    PolicyParams params;
    for (const auto& g : doc.at("games")) {
      const auto id = parse_game(g.at("name").get<std::string>());
      if (!id) throw Error(ErrorKind::kFormat, "unknown game in policy header");
      const auto names = alphabet(*id);
      if (g.at("alphabet").get<std::vector<std::string>>() !=
          std::vector<std::string>(names.begin(), names.end())) {
        throw Error(ErrorKind::kFormat,
                    "alphabet order changed for " + std::string(game_name(*id)));
      }
      params.register_game(*id);
    }
    for (const auto& [key, value] : doc.at("entries").items()) {
      const auto obs = parse_observation_key(key);
      if (!obs) throw Error(ErrorKind::kFormat, "malformed key " + key);
      auto logits = value.get<std::vector<double>>();
      if (logits.size() != alphabet(obs->game).size()) {
        throw Error(ErrorKind::kFormat, "logit vector size mismatch at " + key);
      }
      params.materialize(key, obs->game) = std::move(logits);
    }
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, e.what());
  }
}

std::string export_text(const PolicyParams& params) {
  std::string out;
  char buf[40];
  for (const auto& [key, logits] : params.entries()) {
    out += key;
    out += '\t';
    for (std::size_t i = 0; i < logits.size(); ++i) {
      std::snprintf(buf, sizeof buf, i ? " %.17g" : "%.17g", logits[i]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace selfplay
