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

#include <string>

#include "doctest.h"
#include "selfplay/config.hpp"
#include "test_support.hpp"

using namespace selfplay;
using selfplay::testing::thrown_kind;

namespace {

const char* kSample = R"(
seed = 7
total_steps = 12
batch_size = 32
actors = 3
temperature = 0.9
mask = "legal"

[games]
TicTacToe = 2.0
KuhnPoker = 1.0

[game_options]
kuhn_rounds = 1

[rae]
enabled = false
alpha = 0.9

[learner]
learning_rate = 0.003
max_grad_norm = inf

[opponent]
kind = "FrozenCheckpoint"
lag_steps = 8

[eval]
every = 4
games = 64
greedy = false

[checkpoint]
every = 4
)";

std::string config_message(const std::string& text,
                           std::vector<std::string> overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults match the documented values") {
  const RunConfig c = parse_config("");
  CHECK(c.rae_alpha == 0.95);
  CHECK(c.learner.inner_epochs == 2);
  CHECK(c.learner.clip_eps == 0.2);
  CHECK(c.learner.optimizer.beta1 == 0.9);
  CHECK(c.learner.optimizer.beta2 == 0.95);
  CHECK(c.learner.optimizer.weight_decay == 0.0);
  CHECK(c.learner.optimizer.max_grad_norm == 1.0);
  CHECK(c.learner.optimizer.learning_rate == 1e-2);
  CHECK(c.games.size() == 1);
}

TEST_CASE("parse and render round trip") {
  const RunConfig c = parse_config(kSample);
  CHECK(c.seed == 7);
  CHECK(c.mask == MaskMode::kLegalOnly);
  REQUIRE(c.games.size() == 2);
  CHECK(c.games[0].game == GameId::kTicTacToe);
  CHECK(c.games[0].weight == 2.0);
  CHECK_FALSE(c.rae_enabled);
  CHECK(std::isinf(c.learner.optimizer.max_grad_norm));
  CHECK(c.opponent.kind == OpponentKind::kFrozenCheckpoint);
  CHECK(c.opponent.lag_steps == 8);
  const std::string text = render_config(c);
  const RunConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(render_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("unknown keys are rejected with their path") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"bogus = 1\n", "bogus"},
      {"[rae]\nbeta = 1\n", "rae.beta"},
      {"[learner]\nmomentum = 0.9\n", "learner.momentum"},
      {"[opponent]\nlevel = 3\n", "opponent.level"},
      {"[eval]\nseeds = 3\n", "eval.seeds"},
      {"[checkpoint]\nkeep = 3\n", "checkpoint.keep"},
      {"[log]\nverbose = true\n", "log.verbose"},
      {"[game_options]\nboard = 4\n", "game_options.board"},
      {"[games]\nChess = 1.0\n", "games.Chess"},
  };
  for (const auto& [text, path] : cases) {
    const std::string msg = config_message(text);
    CAPTURE(text);
    CHECK(msg.find(path) != std::string::npos);
  }
}

TEST_CASE("ill-typed and out-of-range values are rejected") {
  CHECK(config_message("batch_size = \"many\"\n").find("batch_size") != std::string::npos);
  CHECK(config_message("batch_size = 0\n").find("batch_size") != std::string::npos);
  CHECK(config_message("mask = \"partial\"\n").find("mask") != std::string::npos);
  CHECK(config_message("[rae]\nalpha = 1.5\n").find("rae.alpha") != std::string::npos);
  CHECK(config_message("[learner]\nkl_loss_coef = 0.1\n").find("kl") != std::string::npos);
  CHECK(config_message("[opponent]\nkind = \"scripted\"\nscript = \"bogus\"\n")
            .find("opponent") != std::string::npos);
  CHECK(config_message("[games]\nKuhnPoker = -1.0\n").find("games") != std::string::npos);
  CHECK(config_message("seed = -3\n").find("seed") != std::string::npos);
  CHECK(config_message("seed = [\n").size() > 0);
}

TEST_CASE("overrides apply in order and keep typing") {
  const std::vector<std::string> ov = {"learner.learning_rate=0.5", "seed=9",
                                       "mask=full", "opponent.kind=UniformRandomLegal",
                                       "seed=11", "game_options.kuhn_rounds=3"};
  const RunConfig c = parse_config(kSample, ov);
  CHECK(c.learner.optimizer.learning_rate == 0.5);
  CHECK(c.seed == 11);
  CHECK(c.mask == MaskMode::kFullAlphabet);
  CHECK(c.opponent.kind == OpponentKind::kUniformRandomLegal);
  CHECK(c.game_options.kuhn_rounds == 3);
  CHECK(config_message(kSample, {"learner.nope=1"}).find("learner.nope") !=
        std::string::npos);
  CHECK(config_message(kSample, {"seed"}).size() > 0);
}

TEST_CASE("config hash ignores run length, actor count and logging only") {
  const RunConfig base = parse_config(kSample);
  const auto h = config_hash(base);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"total_steps=999"})) == h);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"actors=1"})) == h);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"log.trajectory_every=2"})) ==
        h);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"seed=8"})) != h);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"rae.alpha=0.5"})) != h);
  CHECK(config_hash(parse_config(kSample, std::vector<std::string>{"eval.games=65"})) != h);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"kuhn_selfplay.toml", "tictactoe_selfplay.toml", "kuhn_rq4.toml"}) {
    const std::string path = std::string(SELFPLAY_SOURCE_DIR) + "/configs/" + name;
    CAPTURE(path);
    CHECK_NOTHROW(load_config(path));
  }
  CHECK(thrown_kind([] { load_config("/nonexistent/run.toml"); }).has_value());
}
