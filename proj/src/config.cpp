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

#include "selfplay/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "selfplay/error.hpp"
#include "selfplay/rng.hpp"
#include "toml.hpp"

namespace selfplay {
namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kConfig, path + ": " + what);
}

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Typed access to one TOML table with unknown-key rejection.
class Section {
 public:
  Section(const toml::table* table, std::string path)
      : table_(table), path_(std::move(path)) {}

  void allow_only(std::initializer_list<std::string_view> keys) const {
    if (table_ == nullptr) return;
    for (const auto& [k, v] : *table_) {
      if (std::find(keys.begin(), keys.end(), k.str()) == keys.end()) {
        config_error(join(path_, k.str()), "unknown key");
      }
    }
  }

  void read(std::string_view key, std::int64_t& out) const {
    const toml::node* n = find(key);
    if (n == nullptr) return;
    if (!n->is_integer()) config_error(join(path_, key), "expected an integer");
    out = n->as_integer()->get();
  }

  void read(std::string_view key, int& out) const {
    std::int64_t v = out;
    read(key, v);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      config_error(join(path_, key), "integer out of range");
    }
    out = static_cast<int>(v);
  }

  void read(std::string_view key, double& out) const {
    const toml::node* n = find(key);
    if (n == nullptr) return;
    if (n->is_floating_point()) {
      out = n->as_floating_point()->get();
    } else if (n->is_integer()) {
      out = static_cast<double>(n->as_integer()->get());
    } else {
      config_error(join(path_, key), "expected a number");
    }
  }

  void read(std::string_view key, bool& out) const {
    const toml::node* n = find(key);
    if (n == nullptr) return;
    if (!n->is_boolean()) config_error(join(path_, key), "expected a boolean");
    out = n->as_boolean()->get();
  }

  void read(std::string_view key, std::string& out) const {
    const toml::node* n = find(key);
    if (n == nullptr) return;
    if (!n->is_string()) config_error(join(path_, key), "expected a string");
    out = n->as_string()->get();
  }

  Section sub(std::string_view key) const {
    const toml::node* n = find(key);
    if (n == nullptr) return Section(nullptr, join(path_, key));
    if (!n->is_table()) config_error(join(path_, key), "expected a table");
    return Section(n->as_table(), join(path_, key));
  }

  const toml::table* table() const { return table_; }
  const std::string& path() const { return path_; }

 private:
  const toml::node* find(std::string_view key) const {
    return table_ == nullptr ? nullptr : table_->get(key);
  }

  const toml::table* table_;
  std::string path_;
};

void require(bool ok, const char* path, const std::string& what) {
  if (!ok) config_error(path, what);
}

void validate(const RunConfig& c) {
  require(c.total_steps >= 0, "total_steps", "must be >= 0");
  require(c.batch_size >= 1, "batch_size", "must be >= 1");
  require(c.actors >= 1, "actors", "must be >= 1");
  require(c.temperature > 0.0 && std::isfinite(c.temperature), "temperature",
          "must be a positive finite number");
  require(c.max_env_retries >= 0, "max_env_retries", "must be >= 0");
  require(!c.games.empty(), "games", "at least one game is required");
  double total = 0.0;
  for (const auto& g : c.games) {
    const std::string path = "games." + std::string(game_name(g.game));
    if (!(g.weight >= 0.0) || !std::isfinite(g.weight)) config_error(path, "weight must be >= 0");
    total += g.weight;
  }
  require(total > 0.0, "games", "at least one weight must be positive");

  const GameOptions& o = c.game_options;
  require(o.kuhn_rounds >= 1, "game_options.kuhn_rounds", "must be >= 1");
  require(o.pig_target >= 1, "game_options.pig_target", "must be >= 1");
  require(o.horizon_length >= 1, "game_options.horizon_length", "must be >= 1");
  require(o.horizon_legal >= 1 && o.horizon_legal <= 4, "game_options.horizon_legal",
          "must be in [1, 4]");

  require(c.rae_alpha >= 0.0 && c.rae_alpha <= 1.0, "rae.alpha", "must be in [0, 1]");

  const auto& opt = c.learner.optimizer;
  require(opt.learning_rate >= 0.0 && std::isfinite(opt.learning_rate),
          "learner.learning_rate", "must be a finite number >= 0");
  require(opt.beta1 >= 0.0 && opt.beta1 < 1.0, "learner.beta1", "must be in [0, 1)");
  require(opt.beta2 >= 0.0 && opt.beta2 < 1.0, "learner.beta2", "must be in [0, 1)");
  require(opt.epsilon > 0.0, "learner.epsilon", "must be > 0");
  require(opt.weight_decay >= 0.0, "learner.weight_decay", "must be >= 0");
  require(opt.max_grad_norm > 0.0, "learner.max_grad_norm", "must be > 0 (inf disables)");
  require(c.learner.inner_epochs >= 1, "learner.inner_epochs", "must be >= 1");
  require(c.learner.clip_eps > 0.0, "learner.clip_eps", "must be > 0 (inf disables)");
  require(c.learner.kl_loss_coef == 0.0, "learner.kl_loss_coef", "only 0 is supported");
  require(c.learner.kl_penalty_coef == 0.0, "learner.kl_penalty_coef",
          "only 0 is supported");

  require(c.opponent.lag_steps >= 0, "opponent.lag_steps", "must be >= 0");
  if (c.opponent.kind == OpponentKind::kScripted) {
    for (const auto& g : c.games) {
      const auto names = scripts_for(g.game);
      if (std::find(names.begin(), names.end(), c.opponent.script) == names.end()) {
        config_error("opponent.script", "no script '" + c.opponent.script + "' for " +
                                            std::string(game_name(g.game)));
      }
    }
  }

  require(c.eval_every >= 0, "eval.every", "must be >= 0");
  require(c.eval_games >= 1, "eval.games", "must be >= 1");
  require(c.eval_temperature > 0.0, "eval.temperature", "must be > 0");
  require(c.eval_lag_steps >= 0, "eval.lag_steps", "must be >= 0");
  require(c.checkpoint_every >= 0, "checkpoint.every", "must be >= 0");
  require(c.trajectory_log_every >= 0, "log.trajectory_every", "must be >= 0");
}

RunConfig from_table(const toml::table& root) {
  RunConfig c;
  const Section top(&root, "");
  top.allow_only({"seed", "total_steps", "batch_size", "actors", "temperature", "mask",
                  "max_env_retries", "games", "game_options", "rae", "learner",
                  "opponent", "eval", "checkpoint", "log"});
  std::int64_t seed = 0;
  top.read("seed", seed);
  if (seed < 0) config_error("seed", "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  top.read("total_steps", c.total_steps);
  top.read("batch_size", c.batch_size);
  top.read("actors", c.actors);
  top.read("temperature", c.temperature);
  std::string mask(mask_mode_name(c.mask));
  top.read("mask", mask);
  const auto parsed_mask = parse_mask_mode(mask);
  if (!parsed_mask) config_error("mask", "expected \"full\" or \"legal\"");
  c.mask = *parsed_mask;
  top.read("max_env_retries", c.max_env_retries);

  const Section games = top.sub("games");
  if (games.table() != nullptr) {
    c.games.clear();
    for (const auto& [k, v] : *games.table()) {
      const auto id = parse_game(k.str());
      if (!id) config_error(join("games", k.str()), "unknown game");
      WeightedGame g{*id, 0.0};
      games.read(k.str(), g.weight);
      c.games.push_back(g);
    }
    std::sort(c.games.begin(), c.games.end(),
              [](const auto& a, const auto& b) { return a.game < b.game; });
  }

  const Section go = top.sub("game_options");
  go.allow_only({"kuhn_rounds", "kuhn_key_round", "kuhn_key_chip_bucket", "pig_target",
                 "horizon_length", "horizon_legal"});
  go.read("kuhn_rounds", c.game_options.kuhn_rounds);
  go.read("kuhn_key_round", c.game_options.kuhn_key_round);
  go.read("kuhn_key_chip_bucket", c.game_options.kuhn_key_chip_bucket);
  go.read("pig_target", c.game_options.pig_target);
  go.read("horizon_length", c.game_options.horizon_length);
  go.read("horizon_legal", c.game_options.horizon_legal);

  const Section rae = top.sub("rae");
  rae.allow_only({"enabled", "alpha"});
  rae.read("enabled", c.rae_enabled);
  rae.read("alpha", c.rae_alpha);

  const Section ln = top.sub("learner");
  ln.allow_only({"optimizer", "learning_rate", "published_learning_rate", "beta1", "beta2",
                 "epsilon", "weight_decay", "max_grad_norm", "inner_epochs", "clip_eps",
                 "kl_loss_coef", "kl_penalty_coef"});
  auto& opt = c.learner.optimizer;
  std::string optimizer(optimizer_name(opt.kind));
  ln.read("optimizer", optimizer);
  const auto kind = parse_optimizer(optimizer);
  if (!kind) config_error("learner.optimizer", "expected \"adam\" or \"sgd\"");
  opt.kind = *kind;
  ln.read("learning_rate", opt.learning_rate);
  double published = kPublishedLearningRate;
  ln.read("published_learning_rate", published);  // informational only
  ln.read("beta1", opt.beta1);
  ln.read("beta2", opt.beta2);
  ln.read("epsilon", opt.epsilon);
  ln.read("weight_decay", opt.weight_decay);
  ln.read("max_grad_norm", opt.max_grad_norm);
  ln.read("inner_epochs", c.learner.inner_epochs);
  ln.read("clip_eps", c.learner.clip_eps);
  ln.read("kl_loss_coef", c.learner.kl_loss_coef);
  ln.read("kl_penalty_coef", c.learner.kl_penalty_coef);

  const Section op = top.sub("opponent");
  op.allow_only({"kind", "script", "path", "lag_steps", "greedy"});
  std::string opp_kind(opponent_kind_name(c.opponent.kind));
  op.read("kind", opp_kind);
  const auto ok = parse_opponent_kind(opp_kind);
  if (!ok) config_error("opponent.kind", "unknown opponent kind '" + opp_kind + "'");
  c.opponent.kind = *ok;
  op.read("script", c.opponent.script);
  op.read("path", c.opponent.path);
  op.read("lag_steps", c.opponent.lag_steps);
  op.read("greedy", c.opponent.greedy);

  const Section ev = top.sub("eval");
  ev.allow_only({"every", "games", "greedy", "temperature", "lag_steps"});
  ev.read("every", c.eval_every);
  ev.read("games", c.eval_games);
  ev.read("greedy", c.eval_greedy);
  ev.read("temperature", c.eval_temperature);
  ev.read("lag_steps", c.eval_lag_steps);

  const Section ck = top.sub("checkpoint");
  ck.allow_only({"every"});
  ck.read("every", c.checkpoint_every);

  const Section lg = top.sub("log");
  lg.allow_only({"trajectory_every"});
  lg.read("trajectory_every", c.trajectory_log_every);

  validate(c);
  return c;
}

void apply_override(toml::table& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    config_error(assignment, "override must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  toml::table parsed;
  bool literal = true;
  try {
    parsed = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    literal = false;
  }

  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) config_error(path, "empty key segment");
    parts.push_back(part);
  }
  toml::table* table = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = table->get(parts[i]);
    if (n == nullptr) {
      table->insert_or_assign(parts[i], toml::table{});
      n = table->get(parts[i]);
    }
    if (!n->is_table()) config_error(path, "'" + parts[i] + "' is not a table");
    table = n->as_table();
  }
  if (literal) {
    table->insert_or_assign(parts.back(), *parsed.get("v"));
  } else {
    table->insert_or_assign(parts.back(), text);
  }
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::ostringstream out;
  out << toml::value<std::string>(s);
  return out.str();
}

const char* boolean(bool b) { return b ? "true" : "false"; }

}  // namespace

RunConfig parse_config(std::string_view toml_text, std::span<const std::string> overrides) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " at line " << e.source().begin.line;
    config_error("<toml>", msg.str());
  }
  for (const auto& o : overrides) apply_override(root, o);
  return from_table(root);
}

RunConfig load_config(const std::string& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "seed = " << c.seed << "\n"
      << "total_steps = " << c.total_steps << "\n"
      << "batch_size = " << c.batch_size << "\n"
      << "actors = " << c.actors << "\n"
      << "temperature = " << number(c.temperature) << "\n"
      << "mask = \"" << mask_mode_name(c.mask) << "\"\n"
      << "max_env_retries = " << c.max_env_retries << "\n";

  out << "\n[games]\n";
  for (const auto& g : c.games) out << game_name(g.game) << " = " << number(g.weight) << "\n";

  const GameOptions& o = c.game_options;
  out << "\n[game_options]\n"
      << "kuhn_rounds = " << o.kuhn_rounds << "\n"
      << "kuhn_key_round = " << boolean(o.kuhn_key_round) << "\n"
      << "kuhn_key_chip_bucket = " << boolean(o.kuhn_key_chip_bucket) << "\n"
      << "pig_target = " << o.pig_target << "\n"
      << "horizon_length = " << o.horizon_length << "\n"
      << "horizon_legal = " << o.horizon_legal << "\n";

  out << "\n[rae]\n"
      << "enabled = " << boolean(c.rae_enabled) << "\n"
      << "alpha = " << number(c.rae_alpha) << "\n";

  const auto& opt = c.learner.optimizer;
  out << "\n[learner]\n"
      << "optimizer = \"" << optimizer_name(opt.kind) << "\"\n"
      << "learning_rate = " << number(opt.learning_rate) << "\n"
      << "published_learning_rate = " << number(kPublishedLearningRate) << "\n"
      << "beta1 = " << number(opt.beta1) << "\n"
      << "beta2 = " << number(opt.beta2) << "\n"
      << "epsilon = " << number(opt.epsilon) << "\n"
      << "weight_decay = " << number(opt.weight_decay) << "\n"
      << "max_grad_norm = " << number(opt.max_grad_norm) << "\n"
      << "inner_epochs = " << c.learner.inner_epochs << "\n"
      << "clip_eps = " << number(c.learner.clip_eps) << "\n"
      << "kl_loss_coef = " << number(c.learner.kl_loss_coef) << "\n"
      << "kl_penalty_coef = " << number(c.learner.kl_penalty_coef) << "\n";

  out << "\n[opponent]\n"
      << "kind = \"" << opponent_kind_name(c.opponent.kind) << "\"\n"
      << "script = " << quoted(c.opponent.script) << "\n"
      << "path = " << quoted(c.opponent.path) << "\n"
      << "lag_steps = " << c.opponent.lag_steps << "\n"
      << "greedy = " << boolean(c.opponent.greedy) << "\n";

  out << "\n[eval]\n"
      << "every = " << c.eval_every << "\n"
      << "games = " << c.eval_games << "\n"
      << "greedy = " << boolean(c.eval_greedy) << "\n"
      << "temperature = " << number(c.eval_temperature) << "\n"
      << "lag_steps = " << c.eval_lag_steps << "\n";

  out << "\n[checkpoint]\n"
      << "every = " << c.checkpoint_every << "\n";

  out << "\n[log]\n"
      << "trajectory_every = " << c.trajectory_log_every << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  RunConfig c = config;
  c.total_steps = 0;
  c.actors = 1;
  c.trajectory_log_every = 0;
  const std::string text = render_config(c);
  std::uint64_t h = kFnvOffset;
  fnv_bytes(h, text.data(), text.size());
  return h;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return render_config(a) == render_config(b);
}

}  // namespace selfplay
