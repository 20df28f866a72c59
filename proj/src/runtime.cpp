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

#include "selfplay/runtime.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "selfplay/agents.hpp"
#include "selfplay/error.hpp"
#include "selfplay/eval.hpp"
#include "selfplay/parallel.hpp"
#include "selfplay/rng.hpp"

namespace selfplay {

namespace {

constexpr std::uint64_t kStepStream = 0x57E9;
constexpr std::uint64_t kAssignStream = 0xA551;
constexpr std::uint64_t kRetryStream = 0x7E7;
constexpr std::uint64_t kLearnerRoleStream = 7;
constexpr std::uint64_t kEvalStream = 0xE7A1;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Keeps the header and the rows whose leading step field is <= `step`.
void truncate_csv(const std::filesystem::path& path, int step) {
  if (!std::filesystem::exists(path)) return;
  std::istringstream in(read_file(path));
  std::string out, line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      out += line + "\n";
      header = false;
      continue;
    }
    if (std::stoi(line.substr(0, line.find(','))) <= step) out += line + "\n";
  }
  write_file_atomic(path, out);
}

void append_line(const std::filesystem::path& path, const std::string& line) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorKind::kIo, "cannot append to " + path.string());
  out << line << "\n";
}

}  // namespace

std::uint64_t step_seed(std::uint64_t run_seed, int step) {
  return derive_seed(derive_seed(run_seed, kStepStream), static_cast<std::uint64_t>(step));
}

std::vector<Assignment> assign_batch(const RunConfig& config, std::uint64_t seed) {
  double total = 0.0;
  for (const auto& g : config.games) total += g.weight;
  ChanceStream stream(derive_seed(seed, kAssignStream));
  std::vector<Assignment> out;
  out.reserve(config.batch_size);
  for (int i = 0; i < config.batch_size; ++i) {
    GameId game = config.games.front().game;
    if (config.games.size() > 1) {
      const double u = stream.uniform01() * total;
      double acc = 0.0;
      for (const auto& g : config.games) {
        if (g.weight <= 0.0) continue;
        game = g.game;
        acc += g.weight;
        if (u < acc) break;
      }
    }
    out.push_back({game, derive_seed(seed, static_cast<std::uint64_t>(i) + 1)});
  }
  return out;
}

std::vector<Trajectory> collect_batch(const PolicySnapshot& snapshot, const RunConfig& config,
                                      std::uint64_t seed, const PolicySnapshot* frozen,
                                      CollectStats* stats) {
  const auto assignments = assign_batch(config, seed);
  const PolicyAgent learner(snapshot, PolicyAgentOptions{config.temperature, config.mask,
                                                         false, true});
  const bool shared = config.opponent.kind == OpponentKind::kSelfPlayShared;
  std::map<GameId, std::unique_ptr<Agent>> opponents;
  if (!shared) {
    for (const auto& g : config.games) {
      opponents[g.game] =
          make_opponent(config.opponent, g.game, frozen, config.temperature, config.mask);
    }
  }

  std::vector<Trajectory> batch(assignments.size());
  std::vector<int> retries(assignments.size(), 0);
  parallel_for(static_cast<int>(assignments.size()), config.actors, [&](int i) {
    const Assignment& a = assignments[i];
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t s =
          attempt == 0 ? a.seed : derive_seed(a.seed, kRetryStream + attempt);
      try {
        if (shared) {
          batch[i] = play_game(a.game, config.game_options, s, {&learner, &learner});
        } else {
          ChanceStream pick(derive_seed(s, kLearnerRoleStream));
          const Role role = pick.uniform_int(2) == 0 ? Role::kPlayer0 : Role::kPlayer1;
          std::array<const Agent*, 2> seats{};
          seats[index(role)] = &learner;
          seats[index(opponent(role))] = opponents.at(a.game).get();
          batch[i] = play_game(a.game, config.game_options, s, seats);
          batch[i].learner_role = role;
        }
        return;
      } catch (const Error&) {
        if (attempt >= config.max_env_retries) throw;
        ++retries[i];
      }
    }
  });
  if (stats != nullptr) {
    stats->retries = 0;
    for (int r : retries) stats->retries += r;
  }
  return batch;
}

std::vector<RoleAdvantages> batch_advantages(std::span<const Trajectory> batch,
                                             BaselineTable& baselines, bool rae_enabled) {
  std::vector<RoleAdvantages> out(batch.size(), RoleAdvantages{0.0, 0.0});
  std::vector<ReturnSample> samples;
  std::vector<std::pair<std::size_t, Role>> slots;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Trajectory& tr = batch[i];
    for (Role role : {Role::kPlayer0, Role::kPlayer1}) {
      if (tr.learner_role && *tr.learner_role != role) continue;
      const double ret = tr.returns[index(role)];
      if (rae_enabled) {
        samples.push_back({tr.game, role, ret});
        slots.emplace_back(i, role);
      } else {
        out[i][index(role)] = ret;
      }
    }
  }
  if (rae_enabled) {
    const auto records = process_batch(baselines, samples);
    for (std::size_t k = 0; k < records.size(); ++k) {
      out[slots[k].first][index(slots[k].second)] = records[k].advantage;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Trainer::Trainer(RunConfig config, TrainOptions options)
    : config_(std::move(config)),
      options_(std::move(options)),
      baselines_(config_.rae_alpha) {
  for (const auto& g : config_.games) params_.register_game(g.game);
  history_cadence_ = config_.checkpoint_every > 0 ? config_.checkpoint_every : 16;
  history_[0] = snapshot(params_);
  if (config_.opponent.kind == OpponentKind::kFrozenCheckpoint && !config_.opponent.path.empty()) {
    fixed_opponent_ = snapshot(load_checkpoint(config_.opponent.path).policy);
  }
  if (options_.out_dir.empty()) return;

  const auto& out = options_.out_dir;
  std::filesystem::create_directories(out / "checkpoints");
  const auto existing = list_checkpoints(out / "checkpoints");
  if (options_.resume && !existing.empty()) {
    const Checkpoint latest = load_checkpoint(existing.back().second);
    if (latest.config_hash != config_hash(config_)) {
      throw Error(ErrorKind::kConfig, existing.back().second.string() +
                                          ": checkpoint was produced by a different config");
    }
    resume_from(latest);
    for (const auto& [s, path] : existing) {
      if (s > 0 && s <= step_ && s % history_cadence_ == 0) {
        history_[s] = snapshot(load_checkpoint(path).policy);
      }
    }
    truncate_csv(out / "metrics.csv", step_);
    truncate_csv(out / "timing.csv", step_);
    log_line("resumed at step " + std::to_string(step_));
  } else {
    for (const auto& [s, path] : existing) std::filesystem::remove(path);
    std::string header;
    for (const auto& c : metrics_columns()) header += (header.empty() ? "" : ",") + c;
    write_file_atomic(out / "metrics.csv", header + "\n");
    write_file_atomic(out / "timing.csv", "step,collect_seconds,learn_seconds,eval_seconds\n");
    write_file_atomic(out / "run.log", "");
  }
  write_file_atomic(out / "config.toml", render_config(config_));
}

void Trainer::resume_from(const Checkpoint& ckpt) {
  step_ = ckpt.step;
  params_ = ckpt.policy;
  for (const auto& g : config_.games) params_.register_game(g.game);
  baselines_ = ckpt.baselines;
  optimizer_ = ckpt.optimizer;
  nonfinite_streak_ = ckpt.nonfinite_streak;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.step = step_;
  c.policy = params_;
  c.baselines = baselines_;
  c.optimizer = optimizer_;
  c.config_hash = config_hash(config_);
  c.config_toml = render_config(config_);
  c.nonfinite_streak = nonfinite_streak_;
  return c;
}

const PolicySnapshot* Trainer::lag_snapshot(int at_step, int lag) {
  const int target = at_step - lag;
  if (target <= 0) return &history_.at(0);
  auto it = history_.upper_bound(target);
  --it;
  return &it->second;
}

StepRecord Trainer::run_step() {
  const int s = step_ + 1;
  const std::uint64_t seed = step_seed(config_.seed, s);
  const PolicySnapshot snap = snapshot(params_);
  const PolicySnapshot* frozen = nullptr;
  if (config_.opponent.kind == OpponentKind::kFrozenCheckpoint) {
    frozen = fixed_opponent_ ? &*fixed_opponent_
                             : lag_snapshot(s - 1, config_.opponent.lag_steps);
  }

  const auto t_collect = std::chrono::steady_clock::now();
  const auto batch = collect_batch(snap, config_, seed, frozen);
  const double collect_s = seconds_since(t_collect);
  if (snap.hash() != content_hash(params_)) {
    throw Error(ErrorKind::kSnapshotMismatch, "parameters changed during collection");
  }

  StepRecord rec;
  rec.step = s;
  rec.trajectories = static_cast<int>(batch.size());
  long long turns = 0, forfeits = 0, return_p0 = 0, policy_turns = 0;
  double entropy_sum = 0.0;
  for (const auto& tr : batch) {
    if (tr.returns[0] + tr.returns[1] != 0) {
      throw Error(ErrorKind::kIllegalPosition, "trajectory violates the zero-sum ledger");
    }
    turns += static_cast<long long>(tr.turns.size());
    forfeits += tr.reason == Reason::kInvalidMoveForfeit;
    return_p0 += tr.returns[0];
    for (const auto& t : tr.turns) {
      if (!t.policy_turn) continue;
      entropy_sum += t.entropy;
      ++policy_turns;
    }
  }
  const double n = static_cast<double>(batch.size());
  rec.mean_game_length = turns / n;
  rec.invalid_move_rate = forfeits / n;
  rec.mean_return_p0 = return_p0 / n;
  rec.entropy = policy_turns > 0 ? entropy_sum / policy_turns : 0.0;

  const auto t_learn = std::chrono::steady_clock::now();
  BaselineTable next_baselines = baselines_;
  const auto advantages = batch_advantages(batch, next_baselines, config_.rae_enabled);
  try {
    ProximalResult result =
        proximal_step(params_, batch, advantages, config_.learner, optimizer_);
    params_ = std::move(result.params);
    optimizer_ = std::move(result.optimizer);
    baselines_ = std::move(next_baselines);
    nonfinite_streak_ = 0;
    rec.grad_norm = result.report.gradient_norm_pre_clip;
    rec.clipped = result.report.clipped;
    rec.ratio_clip_fraction = result.report.ratio_clip_fraction;
    rec.optimizer_steps = result.report.optimizer_steps;
    rec.mean_advantage = result.report.mean_advantage;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonFiniteGradient) throw;
    rec.aborted = true;
    ++nonfinite_streak_;
  }
  const double learn_s = seconds_since(t_learn);

  step_ = s;
  if (s % history_cadence_ == 0) history_[s] = snapshot(params_);
  for (const auto& g : config_.games) {
    for (Role role : {Role::kPlayer0, Role::kPlayer1}) {
      rec.baseline[{g.game, role}] = baselines_.value(g.game, role);
    }
  }

  const auto t_eval = std::chrono::steady_clock::now();
  if (config_.eval_every > 0 && s % config_.eval_every == 0) evaluate(rec);
  const double eval_s = seconds_since(t_eval);

  persist(rec, collect_s, learn_s, eval_s, batch);
  if (options_.on_step) options_.on_step(rec);
  return rec;
}

void Trainer::evaluate(StepRecord& rec) {
  const PolicyAgentOptions agent_options{config_.eval_temperature, config_.mask,
                                         config_.eval_greedy, true};
  const PolicyAgent current(snapshot(params_), agent_options, "policy");
  const PolicyAgent lagged(*lag_snapshot(step_, config_.eval_lag_steps), agent_options, "lag");
  const UniformRandomAgent random;
  const std::uint64_t seed =
      derive_seed(derive_seed(config_.seed, kEvalStream), static_cast<std::uint64_t>(step_));
  std::uint64_t match = 0;
  for (const auto& wg : config_.games) {
    const std::string g(game_name(wg.game));
    const auto vs_random = play_match(current, random, wg.game, config_.game_options,
                                      config_.eval_games, derive_seed(seed, ++match),
                                      config_.actors);
    rec.eval[g + "_eval_win_random"] = vs_random.win_rate;
    rec.eval[g + "_eval_nonloss_random"] =
        static_cast<double>(vs_random.wins + vs_random.draws) / vs_random.n_games;
    rec.eval[g + "_eval_invalid"] = vs_random.invalid_rate_a;
    for (const auto& script : scripts_for(wg.game)) {
      const ScriptedAgent scripted(wg.game, script);
      const auto m = play_match(current, scripted, wg.game, config_.game_options,
                                config_.eval_games, derive_seed(seed, ++match), config_.actors);
      rec.eval[g + "_eval_win_" + script] = m.win_rate;
      rec.eval[g + "_eval_nonloss_" + script] =
          static_cast<double>(m.wins + m.draws) / m.n_games;
    }
    const auto vs_lag = play_match(current, lagged, wg.game, config_.game_options,
                                   config_.eval_games, derive_seed(seed, ++match),
                                   config_.actors);
    rec.eval[g + "_eval_win_lag"] = vs_lag.decisive_win_rate;
    if (wg.game == GameId::kKuhnPoker) {
      rec.eval[g + "_exploitability"] =
          kuhn_exploitability(params_, config_.game_options).exploitability;
    }
  }
}

std::vector<std::string> Trainer::metrics_columns() const {
  std::vector<std::string> cols = {"step",          "trajectories",     "aborted",
                                   "grad_norm",     "clipped",          "ratio_clip_fraction",
                                   "entropy",       "mean_game_length", "invalid_move_rate",
                                   "mean_return_p0", "optimizer_steps"};
  for (const auto& wg : config_.games) {
    const std::string g(game_name(wg.game));
    for (const char* c : {"_baseline_p0", "_baseline_p1", "_adv_p0", "_adv_p1"}) {
      cols.push_back(g + c);
    }
  }
  for (const auto& wg : config_.games) {
    const std::string g(game_name(wg.game));
    cols.push_back(g + "_eval_win_random");
    cols.push_back(g + "_eval_nonloss_random");
    cols.push_back(g + "_eval_invalid");
    for (const auto& script : scripts_for(wg.game)) {
      cols.push_back(g + "_eval_win_" + script);
      cols.push_back(g + "_eval_nonloss_" + script);
    }
    cols.push_back(g + "_eval_win_lag");
    if (wg.game == GameId::kKuhnPoker) cols.push_back(g + "_exploitability");
  }
  return cols;
}

std::string Trainer::metrics_row(const StepRecord& r) const {
  std::string row = std::to_string(r.step) + "," + std::to_string(r.trajectories) + "," +
                    (r.aborted ? "1" : "0") + "," + fmt(r.grad_norm) + "," +
                    (r.clipped ? "1" : "0") + "," + fmt(r.ratio_clip_fraction) + "," +
                    fmt(r.entropy) + "," + fmt(r.mean_game_length) + "," +
                    fmt(r.invalid_move_rate) + "," + fmt(r.mean_return_p0) + "," +
                    std::to_string(r.optimizer_steps);
  for (const auto& wg : config_.games) {
    for (Role role : {Role::kPlayer0, Role::kPlayer1}) {
      row += "," + fmt(r.baseline.at({wg.game, role}));
    }
    for (Role role : {Role::kPlayer0, Role::kPlayer1}) {
      const auto it = r.mean_advantage.find({wg.game, role});
      row += "," + (it == r.mean_advantage.end() ? std::string() : fmt(it->second));
    }
  }
  const auto cols = metrics_columns();
  const std::size_t eval_start = 11 + 4 * config_.games.size();
  for (std::size_t c = eval_start; c < cols.size(); ++c) {
    const auto it = r.eval.find(cols[c]);
    row += "," + (it == r.eval.end() ? std::string() : fmt(it->second));
  }
  return row;
}

void Trainer::persist(const StepRecord& rec, double collect_s, double learn_s, double eval_s,
                      const std::vector<Trajectory>& batch) {
  std::ostringstream line;
  line << "step " << rec.step << (rec.aborted ? " ABORTED non-finite gradient" : "")
       << " grad_norm=" << rec.grad_norm << " entropy=" << rec.entropy
       << " length=" << rec.mean_game_length << " invalid=" << rec.invalid_move_rate;
  for (const auto& [k, v] : rec.eval) line << " " << k << "=" << v;
  log_line(line.str());
  if (options_.out_dir.empty()) return;

  const auto& out = options_.out_dir;
  append_line(out / "metrics.csv", metrics_row(rec));
  append_line(out / "timing.csv", std::to_string(rec.step) + "," + fmt(collect_s) + "," +
                                      fmt(learn_s) + "," + fmt(eval_s));
  if (config_.trajectory_log_every > 0 && rec.step % config_.trajectory_log_every == 0) {
    char name[40];
    std::snprintf(name, sizeof name, "step_%04d.jsonl", rec.step);
    write_file_atomic(out / "trajectories" / name, to_jsonl(batch));
  }
  if (config_.checkpoint_every > 0 && rec.step % config_.checkpoint_every == 0) save(rec.step);
}

void Trainer::save(int step) {
  save_checkpoint(options_.out_dir / "checkpoints" / checkpoint_file_name(step), checkpoint());
}

void Trainer::log_line(const std::string& line) {
  if (!options_.out_dir.empty()) append_line(options_.out_dir / "run.log", line);
  if (!options_.quiet && options_.log != nullptr) *options_.log << line << std::endl;
}

TrainResult Trainer::run() {
  TrainResult result;
  while (step_ < config_.total_steps && !aborted()) {
    if (options_.stop != nullptr && options_.stop->load()) {
      result.stopped = true;
      log_line("stop requested at step " + std::to_string(step_));
      break;
    }
    result.records.push_back(run_step());
  }
  result.aborted = aborted();
  if (result.aborted) log_line("training aborted: repeated non-finite gradients");
  if (!options_.out_dir.empty()) save(step_);
  result.final_step = step_;
  result.checkpoint = checkpoint();
  return result;
}

TrainResult train(const RunConfig& config, const TrainOptions& options) {
  return Trainer(config, options).run();
}

}  // namespace selfplay
