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

#ifndef SELFPLAY_REPLAY_HPP_
#define SELFPLAY_REPLAY_HPP_

// Re-simulation of logged trajectories from (game, seed, options, actions).

#include <span>

#include "selfplay/policy.hpp"
#include "selfplay/trajectory.hpp"

namespace selfplay {

struct ReplayReport {
  int trajectories = 0;
  int turns = 0;
  int logprobs_checked = 0;
  double max_logprob_deviation = 0.0;  // against `params`, 0 if none given
  int logprob_deviations = 0;          // turns deviating by more than 1e-9
};

// Throws kReplayDivergence naming the trajectory and the first differing
// turn when roles, keys, legality flags or the outcome disagree. Logprob
// differences are reported, not thrown.
ReplayReport replay_trajectories(std::span<const Trajectory> trajectories,
                                 const PolicyParams* params = nullptr);

}  // namespace selfplay

#endif  // SELFPLAY_REPLAY_HPP_
