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

#ifndef SELFPLAY_CHECKPOINT_HPP_
#define SELFPLAY_CHECKPOINT_HPP_

// Learner state at a step boundary: policy table, baselines, optimizer
// moments and the resolved config that produced them.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfplay/advantage.hpp"
#include "selfplay/learner.hpp"
#include "selfplay/policy.hpp"

namespace selfplay {

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  int step = 0;
  PolicyParams policy;
  BaselineTable baselines;
  OptimizerState optimizer;
  std::uint64_t config_hash = 0;
  std::string config_toml;  // resolved config of the run
  int nonfinite_streak = 0;  // consecutive aborted steps before `step`

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
// Throws kIo for missing files, kFormat for malformed ones.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// "step_0016.json"
std::string checkpoint_file_name(int step);

// Checkpoint files in `dir` sorted by step; empty if the directory is absent.
std::vector<std::pair<int, std::filesystem::path>> list_checkpoints(
    const std::filesystem::path& dir);

// Writes `text` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace selfplay

#endif  // SELFPLAY_CHECKPOINT_HPP_
