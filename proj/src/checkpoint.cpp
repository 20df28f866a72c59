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

#include "selfplay/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "selfplay/error.hpp"

namespace selfplay {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used, 16);
  if (used != s.size()) throw Error(ErrorKind::kFormat, "bad config_hash '" + s + "'");
  return v;
}

}  // namespace

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
  nlohmann::json doc;
  doc["format_version"] = Checkpoint::kFormatVersion;
  doc["step"] = c.step;
  doc["config_hash"] = hex64(c.config_hash);
  doc["nonfinite_streak"] = c.nonfinite_streak;
  doc["config"] = c.config_toml;
  doc["policy"] = policy_to_json(c.policy);
  doc["baselines"] = baselines_to_json(c.baselines);
  doc["optimizer"] = optimizer_to_json(c.optimizer);
  return doc;
}

Checkpoint checkpoint_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != Checkpoint::kFormatVersion) {
      throw Error(ErrorKind::kFormat, "unsupported checkpoint format_version");
    }
    Checkpoint c;
    c.step = doc.at("step").get<int>();
    c.config_hash = parse_hex64(doc.at("config_hash").get<std::string>());
    c.nonfinite_streak = doc.value("nonfinite_streak", 0);
    c.config_toml = doc.at("config").get<std::string>();
    c.policy = policy_from_json(doc.at("policy"));
    c.baselines = baselines_from_json(doc.at("baselines"));
    c.optimizer = optimizer_from_json(doc.at("optimizer"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::kFormat, "malformed checkpoint config_hash");
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_json(ckpt).dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  return checkpoint_from_json(doc);
}

std::string checkpoint_file_name(int step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%04d.json", step);
  return buf;
}

std::vector<std::pair<int, std::filesystem::path>> list_checkpoints(
    const std::filesystem::path& dir) {
  std::vector<std::pair<int, std::filesystem::path>> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    int step = 0;
    char tail = 0;
    if (std::sscanf(name.c_str(), "step_%d.jso%c", &step, &tail) == 2 && tail == 'n' &&
        name.size() > 5 && name.substr(name.size() - 5) == ".json") {
      out.emplace_back(step, entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace selfplay
