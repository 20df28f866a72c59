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

#ifndef SELFPLAY_ABLATION_HPP_
#define SELFPLAY_ABLATION_HPP_

// Comparative training suites over shared step seeds:
//   rq2  opponent arms: selfplay, random, scripted, frozen (lagged self)
//   rq4  advantage arms: rae_on, rae_off (raw returns)

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "selfplay/config.hpp"
#include "selfplay/runtime.hpp"

namespace selfplay {

struct AblationArm {
  std::string name;
  RunConfig config;
};

// Throws kConfig for unknown suites, or for rq2 with several games (the
// scripted arm needs one game's script).
std::vector<AblationArm> ablation_arms(std::string_view suite, const RunConfig& base);

// Population coefficient of variation; 0 for empty input or zero mean.
double coefficient_of_variation(std::span<const double> values);

struct AblationResult {
  std::string suite;
  std::vector<std::string> arms;  // "<arm>" or "<arm>@<seed>" with repeats
  std::vector<std::vector<StepRecord>> records;  // per arm, per step
  std::string csv;              // side-by-side per-step metrics
  nlohmann::json summary;
};

// Trains every arm for seeds base.seed .. base.seed + repeats - 1 (into
// out_dir/<arm>[@<seed>] when out_dir is set); all arms of one seed share
// step seeds. For rq4 the summary holds each arm's gradient-norm
// coefficient of variation over steps 1..200, per seed and averaged, and
// whether the rae_off average exceeds the rae_on average.
AblationResult run_ablation(std::string_view suite, const RunConfig& base,
                            const std::filesystem::path& out_dir = {}, bool quiet = true,
                            std::ostream* log = nullptr, int repeats = 1);

}  // namespace selfplay

#endif  // SELFPLAY_ABLATION_HPP_
