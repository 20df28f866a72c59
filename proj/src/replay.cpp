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

#include "selfplay/replay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfplay/env.hpp"
#include "selfplay/error.hpp"

namespace selfplay {

namespace {

[[noreturn]] void diverge(std::size_t traj, int turn, const std::string& what) {
  throw Error(ErrorKind::kReplayDivergence, "trajectory " + std::to_string(traj) + " turn " +
                                                std::to_string(turn) + ": " + what);
}

}  // namespace

ReplayReport replay_trajectories(std::span<const Trajectory> trajectories,
                                 const PolicyParams* params) {
  ReplayReport report;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    GameState state = reset(tr.game, tr.seed, tr.options);
    for (std::size_t k = 0; k < tr.turns.size(); ++k) {
      const TurnRecord& turn = tr.turns[k];
      const int t = static_cast<int>(k);
      if (state.terminal) diverge(i, t, "game already over");
      if (turn.t != state.turn) diverge(i, t, "turn index " + std::to_string(turn.t));
      const Role role = active_role(state);
      if (turn.role != role) diverge(i, t, "role mismatch");
      const ObservationKey obs = observe(state, role);
      if (turn.obs_key != obs.canonical()) {
        diverge(i, t, "observation '" + turn.obs_key + "' != '" + obs.canonical() + "'");
      }
      if (turn.legal != is_legal(state, turn.action)) diverge(i, t, "legality flag mismatch");
      if (params != nullptr && turn.policy_turn && !std::isnan(turn.logprob)) {
        const ActionMask mask = turn.mask_mode == MaskMode::kFullAlphabet
                                    ? ActionMask::full()
                                    : ActionMask::legal_only(legal_action_indices(state));
        const auto probs = action_distribution(*params, obs, turn.temperature, mask);
        const double deviation = std::abs(std::log(probs[turn.action]) - turn.logprob);
        const double d = std::isnan(deviation) ? INFINITY : deviation;
        report.max_logprob_deviation = std::max(report.max_logprob_deviation, d);
        report.logprob_deviations += d > 1e-9;
        ++report.logprobs_checked;
      }
      state = apply(state, ActionToken{tr.game, turn.action});
      ++report.turns;
    }
    const int last = static_cast<int>(tr.turns.size());
    if (!state.terminal) diverge(i, last, "game not over after the logged turns");
    const Outcome out = outcome(state);
    if (out.rho != tr.returns[0]) diverge(i, last, "outcome rho mismatch");
    if (out.reason != tr.reason) diverge(i, last, "outcome reason mismatch");
    ++report.trajectories;
  }
  return report;
}

}  // namespace selfplay
