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

// Command-line driver: train, eval, exploitability, ablate, replay and
// inspect-checkpoint. Exit codes: 0 success, 1 validation or input error,
// 2 aborted training, 3 replay divergence.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfplay/ablation.hpp"
#include "selfplay/checkpoint.hpp"
#include "selfplay/config.hpp"
#include "selfplay/error.hpp"
#include "selfplay/eval.hpp"
#include "selfplay/replay.hpp"
#include "selfplay/runtime.hpp"

namespace fs = std::filesystem;
using namespace selfplay;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAborted = 2;
constexpr int kExitDivergence = 3;

constexpr const char* kOutRootEnv = "SELFPLAY_OUT_ROOT";

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "TOML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--override", c.overrides, "dotted.key=value, repeatable")->take_all();
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "run seed (overrides the config)");
  cmd->add_flag("--quiet", c.quiet, "suppress progress output");
}

RunConfig resolve_config(const Common& c) {
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  if (c.config_path.empty()) return parse_config("", overrides);
  return load_config(c.config_path, overrides);
}

fs::path output_dir(const Common& c, const std::string& command) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv(kOutRootEnv);
  const std::string stem =
      c.config_path.empty() ? "default" : fs::path(c.config_path).stem().string();
  return fs::path(root != nullptr && *root ? root : "runs") / (command + "-" + stem);
}

RunConfig config_of(const Checkpoint& ckpt, const std::vector<std::string>& overrides) {
  return parse_config(ckpt.config_toml, overrides);
}

int cmd_train(const Common& c, bool fresh) {
  const RunConfig config = resolve_config(c);
  TrainOptions options;
  options.out_dir = output_dir(c, "train");
  options.resume = !fresh;
  options.quiet = c.quiet;
  options.log = &std::cerr;
  options.stop = &g_stop;
  const TrainResult result = train(config, options);
  if (!c.quiet) {
    std::cout << "run directory: " << options.out_dir.string() << "\n"
              << "final step: " << result.final_step << "\n";
  }
  return result.aborted ? kExitAborted : kExitOk;
}

int cmd_eval(const Common& c, const std::string& checkpoint_path, int games) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  std::vector<std::string> overrides = c.overrides;
  if (games > 0) overrides.push_back("eval.games=" + std::to_string(games));
  RunConfig config = config_of(ckpt, overrides);
  const std::uint64_t seed = c.seed.value_or(config.seed);
  const MetricsRow row = metrics_suite(ckpt.policy, ckpt.baselines, config, seed, config.actors);
  if (!c.quiet) std::cout << metrics_table(row);
  if (!c.out.empty()) {
    const fs::path out = c.out;
    write_file_atomic(out / "config.toml", render_config(config));
    write_file_atomic(out / "eval.json", metrics_to_json(row).dump(2) + "\n");
    write_file_atomic(out / "eval.csv", metrics_csv(row));
  }
  return kExitOk;
}

int cmd_exploitability(const Common& c, const std::string& checkpoint_path,
                       const std::string& reference, double alpha) {
  ExploitabilityReport report;
  if (!checkpoint_path.empty()) {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const RunConfig config = config_of(ckpt, c.overrides);
    report = kuhn_exploitability(ckpt.policy, config.game_options,
                                 fs::path(checkpoint_path).filename().string());
  } else if (reference == "uniform") {
    report = kuhn_exploitability(kuhn_uniform_strategy(), "uniform");
  } else if (reference == "nash") {
    report = kuhn_exploitability(kuhn_nash_strategy(alpha), "nash");
  } else {
    throw Error(ErrorKind::kConfig, "--reference: expected uniform or nash");
  }
  const std::string text = exploitability_to_json(report).dump(2);
  if (!c.quiet) std::cout << text << "\n";
  if (!c.out.empty()) write_file_atomic(fs::path(c.out) / "exploitability.json", text + "\n");
  return kExitOk;
}

int cmd_ablate(const Common& c, const std::string& suite, int repeats) {
  const RunConfig base = resolve_config(c);
  const fs::path out = output_dir(c, "ablate-" + suite);
  fs::create_directories(out);
  write_file_atomic(out / "config.toml", render_config(base));
  const AblationResult result = run_ablation(suite, base, out, c.quiet, &std::cerr, repeats);
  if (!c.quiet) {
    std::cout << result.summary.dump(2) << "\n"
              << "comparison: " << (out / (suite + "_comparison.csv")).string() << "\n";
  }
  return kExitOk;
}

int cmd_replay(const Common& c, const std::string& trajectories, const std::string& checkpoint) {
  const auto batch = read_jsonl(trajectories);
  std::optional<Checkpoint> ckpt;
  if (!checkpoint.empty()) ckpt = load_checkpoint(checkpoint);
  const ReplayReport report = replay_trajectories(batch, ckpt ? &ckpt->policy : nullptr);
  if (!c.quiet) {
    std::cout << "trajectories: " << report.trajectories << "\n"
              << "turns: " << report.turns << "\n"
              << "state divergences: 0\n";
    if (ckpt) {
      std::cout << "logprobs checked: " << report.logprobs_checked << "\n"
                << "logprob deviations > 1e-9: " << report.logprob_deviations << "\n"
                << "max logprob deviation: " << report.max_logprob_deviation << "\n";
    }
  }
  return kExitOk;
}

int cmd_inspect(const Common& c, const std::string& checkpoint, const std::string& export_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  std::cout << "step: " << ckpt.step << "\n"
            << "config_hash: " << std::hex << ckpt.config_hash << std::dec << "\n"
            << "entries: " << ckpt.policy.size() << "\n"
            << "optimizer_steps: " << ckpt.optimizer.step << "\n"
            << "nonfinite_streak: " << ckpt.nonfinite_streak << "\n"
            << "games:";
  for (GameId g : ckpt.policy.games()) std::cout << " " << game_name(g);
  std::cout << "\nbaselines:\n";
  for (const auto& [key, entry] : ckpt.baselines.entries()) {
    std::cout << "  " << game_name(key.first) << " p" << index(key.second) << " = "
              << entry.value << " (" << entry.update_count << " updates)\n";
  }
  if (!c.quiet) std::cout << "config:\n" << ckpt.config_toml;
  if (!export_path.empty()) write_file_atomic(export_path, export_text(ckpt.policy));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular self-play trainer with role-conditioned advantages"};
  app.require_subcommand(1);

  Common common;
  bool fresh = false;
  std::string checkpoint, reference = "uniform", suite, trajectories, export_path;
  int games = 0;
  int repeats = 1;
  double alpha = 1.0 / 6.0;

  auto* train = app.add_subcommand("train", "train a policy; resumes from out/checkpoints");
  add_common(train, common);
  train->add_flag("--fresh", fresh, "ignore existing checkpoints in the output directory");

  auto* eval = app.add_subcommand("eval", "metrics suite for a checkpoint");
  add_common(eval, common);
  eval->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required()->check(
      CLI::ExistingFile);
  eval->add_option("--games", games, "games per match (default from config)");

  auto* expl = app.add_subcommand("exploitability", "Kuhn poker exploitability");
  add_common(expl, common);
  expl->add_option("--checkpoint", checkpoint, "checkpoint JSON")->check(CLI::ExistingFile);
  expl->add_option("--reference", reference, "uniform | nash, when no checkpoint is given");
  expl->add_option("--alpha", alpha, "equilibrium family parameter in [0, 1/3]");

  auto* ablate = app.add_subcommand("ablate", "comparative training suite");
  add_common(ablate, common);
  ablate->add_option("suite", suite, "rq2 | rq4")->required();
  ablate->add_option("--repeats", repeats, "seeds per arm: seed, seed+1, ...")
      ->check(CLI::PositiveNumber);

  auto* replay = app.add_subcommand("replay", "re-simulate logged trajectories");
  add_common(replay, common);
  replay->add_option("--trajectories", trajectories, "trajectory JSONL")->required()->check(
      CLI::ExistingFile);
  replay->add_option("--checkpoint", checkpoint, "checkpoint for logprob checks")->check(
      CLI::ExistingFile);

  auto* inspect = app.add_subcommand("inspect-checkpoint", "summarize a checkpoint");
  add_common(inspect, common);
  inspect->add_option("--checkpoint", checkpoint, "checkpoint JSON")->required()->check(
      CLI::ExistingFile);
  inspect->add_option("--export-text", export_path, "write key<TAB>logits lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    if (*train) return cmd_train(common, fresh);
    if (*eval) return cmd_eval(common, checkpoint, games);
    if (*expl) return cmd_exploitability(common, checkpoint, reference, alpha);
    if (*ablate) return cmd_ablate(common, suite, repeats);
    if (*replay) return cmd_replay(common, trajectories, checkpoint);
    if (*inspect) return cmd_inspect(common, checkpoint, export_path);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    if (e.kind() == ErrorKind::kReplayDivergence) return kExitDivergence;
    if (e.kind() == ErrorKind::kNonFiniteGradient) return kExitAborted;
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
