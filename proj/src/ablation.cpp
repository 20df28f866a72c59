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

#include "selfplay/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "selfplay/agents.hpp"
#include "selfplay/checkpoint.hpp"
#include "selfplay/error.hpp"

namespace selfplay {

namespace {

constexpr int kCvWindow = 200;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<AblationArm> ablation_arms(std::string_view suite, const RunConfig& base) {
  std::vector<AblationArm> arms;
  if (suite == "rq2") {
    if (base.games.size() != 1) {
      throw Error(ErrorKind::kConfig, "games: the rq2 suite trains on exactly one game");
    }
    RunConfig c = base;
    c.opponent = OpponentSpec{};
    arms.push_back({"selfplay", c});
    c.opponent.kind = OpponentKind::kUniformRandomLegal;
    arms.push_back({"random", c});
    c.opponent.kind = OpponentKind::kScripted;
    c.opponent.script = scripts_for(base.games.front().game).front();
    arms.push_back({"scripted", c});
    c.opponent = OpponentSpec{};
    c.opponent.kind = OpponentKind::kFrozenCheckpoint;
    c.opponent.lag_steps = base.eval_lag_steps;
    arms.push_back({"frozen", c});
  } else if (suite == "rq4") {
    RunConfig c = base;
    c.rae_enabled = true;
    arms.push_back({"rae_on", c});
    c.rae_enabled = false;
    arms.push_back({"rae_off", c});
  } else {
    throw Error(ErrorKind::kConfig, "suite: unknown ablation suite '" + std::string(suite) +
                                        "' (expected rq2 or rq4)");
  }
  return arms;
}

double coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return std::sqrt(var) / std::abs(mean);
}

AblationResult run_ablation(std::string_view suite, const RunConfig& base,
                            const std::filesystem::path& out_dir, bool quiet,
                            std::ostream* log, int repeats) {
  AblationResult result;
  result.suite = std::string(suite);
  std::vector<AblationArm> arms;
  std::vector<std::string> arm_kind;
  for (int k = 0; k < std::max(1, repeats); ++k) {
    RunConfig seeded = base;
    seeded.seed = base.seed + static_cast<std::uint64_t>(k);
    for (auto& arm : ablation_arms(suite, seeded)) {
      arm_kind.push_back(arm.name);
      if (repeats > 1) arm.name += "@" + std::to_string(seeded.seed);
      arms.push_back(std::move(arm));
    }
  }

  std::vector<std::string> columns;
  std::vector<std::vector<std::map<std::string, std::string>>> cells;
  for (const auto& arm : arms) {
    TrainOptions options;
    options.quiet = quiet;
    options.log = log;
    options.resume = false;
    if (!out_dir.empty()) options.out_dir = out_dir / arm.name;
    Trainer trainer(arm.config, options);
    if (log != nullptr && !quiet) *log << "arm " << arm.name << std::endl;
    TrainResult run = trainer.run();
    const auto cols = trainer.metrics_columns();
    if (columns.empty()) columns = cols;
    std::vector<std::map<std::string, std::string>> rows;
    for (const auto& rec : run.records) {
      const auto values = split(trainer.metrics_row(rec));
      std::map<std::string, std::string> row;
      for (std::size_t c = 0; c < cols.size() && c < values.size(); ++c) row[cols[c]] = values[c];
      rows.push_back(std::move(row));
    }
    cells.push_back(std::move(rows));
    result.arms.push_back(arm.name);
    result.records.push_back(std::move(run.records));
  }

  // Side-by-side CSV: step, then <arm>:<column> for every non-step column.
  std::ostringstream csv;
  csv << "step";
  for (const auto& arm : result.arms) {
    for (std::size_t c = 1; c < columns.size(); ++c) csv << "," << arm << ":" << columns[c];
  }
  csv << "\n";
  std::size_t steps = 0;
  for (const auto& rows : cells) steps = std::max(steps, rows.size());
  for (std::size_t s = 0; s < steps; ++s) {
    csv << s + 1;
    for (const auto& rows : cells) {
      for (std::size_t c = 1; c < columns.size(); ++c) {
        csv << ",";
        if (s < rows.size()) {
          const auto it = rows[s].find(columns[c]);
          if (it != rows[s].end()) csv << it->second;
        }
      }
    }
    csv << "\n";
  }
  result.csv = csv.str();

  nlohmann::json summary;
  summary["suite"] = result.suite;
  summary["steps"] = steps;
  summary["arms"] = nlohmann::json::object();
  std::map<std::string, double> cv;
  std::map<std::string, std::vector<double>> cv_by_kind;
  for (std::size_t a = 0; a < result.arms.size(); ++a) {
    const auto& recs = result.records[a];
    std::vector<double> norms, entropy;
    for (const auto& r : recs) {
      if (r.step <= kCvWindow && !r.aborted) norms.push_back(r.grad_norm);
      entropy.push_back(r.entropy);
    }
    nlohmann::json arm;
    cv[result.arms[a]] = coefficient_of_variation(norms);
    arm["grad_norm_cv_steps_1_200"] = cv[result.arms[a]];
    cv_by_kind[arm_kind[a]].push_back(cv[result.arms[a]]);
    double mean = 0.0;
    for (double v : norms) mean += v;
    arm["grad_norm_mean"] = norms.empty() ? 0.0 : mean / norms.size();
    arm["final_entropy"] = entropy.empty() ? 0.0 : entropy.back();
    nlohmann::json final_eval = nlohmann::json::object();
    for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
      if (it->eval.empty()) continue;
      for (const auto& [k, v] : it->eval) final_eval[k] = v;
      final_eval["step"] = it->step;
      break;
    }
    arm["final_eval"] = final_eval;
    summary["arms"][result.arms[a]] = arm;
  }
  std::map<std::string, double> mean_cv;
  for (const auto& [kind, values] : cv_by_kind) {
    double total = 0.0;
    for (double v : values) total += v;
    mean_cv[kind] = total / static_cast<double>(values.size());
    summary["mean_grad_norm_cv_steps_1_200"][kind] = mean_cv[kind];
  }
  if (suite == "rq4") {
    const double on = mean_cv["rae_on"], off = mean_cv["rae_off"];
    summary["rae_off_cv_higher"] = off > on;
    summary["cv_ratio_off_over_on"] = on > 0.0 ? off / on : 0.0;
  }
  result.summary = summary;

  if (!out_dir.empty()) {
    write_file_atomic(out_dir / (result.suite + "_comparison.csv"), result.csv);
    write_file_atomic(out_dir / (result.suite + "_summary.json"), summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace selfplay
