// Copyright 2026 The Inquire Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "inquire/errors.hpp"
#include "inquire/rewards.hpp"

namespace inquire {

/// MCTS parameters for one planning turn.
struct SearchConfig {
  int iterations = 10;       // K
  double exploration = 0.2;  // C
  int sim_depth = 3;         // d_s
  int fanout = 3;            // m
  RewardConfig reward{};
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (iterations < 1) throw ConfigError("K must be >= 1");
    if (sim_depth < 1) throw ConfigError("d_s must be >= 1");
    if (fanout < 1) throw ConfigError("m must be >= 1");
    if (exploration < 0.0) throw ConfigError("C must be >= 0");
    if (!(reward.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  }
};

/// Everything the flat configuration document can set. Defaults are the
/// values the method was evaluated with.
struct Config {
  SearchConfig search{};
  double delta = 0.6;  // share of the turn budget spent on planned questions
  int max_turns = 20;  // T
  double tau = 0.9;    // cluster similarity threshold
  double beta = 0.2;   // bonus scale
  double gamma = 0.9;  // bonus depth decay

  void validate() const {
    search.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (max_turns < 1) throw ConfigError("T must be >= 1");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  }
};

/// Applies the keys present in a flat JSON object on top of `base`. Unknown
/// keys are rejected so typos do not silently fall back to defaults.
inline Config apply_config(Config base, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "K") base.search.iterations = value.get<int>();
      else if (key == "C") base.search.exploration = value.get<double>();
      else if (key == "d_s") base.search.sim_depth = value.get<int>();
      else if (key == "m") base.search.fanout = value.get<int>();
      else if (key == "lambda") base.search.reward.lambda = value.get<double>();
      else if (key == "seed") base.search.rng_seed = value.get<std::uint64_t>();
      else if (key == "delta") base.delta = value.get<double>();
      else if (key == "T") base.max_turns = value.get<int>();
      else if (key == "tau") base.tau = value.get<double>();
      else if (key == "beta") base.beta = value.get<double>();
      else if (key == "gamma") base.gamma = value.get<double>();
      else throw ConfigError("unknown config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  base.validate();
  return base;
}

inline Config load_config(const std::filesystem::path& path, Config base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return apply_config(std::move(base), j);
}

inline nlohmann::json config_to_json(const Config& c) {
  return {{"K", c.search.iterations}, {"C", c.search.exploration}, {"d_s", c.search.sim_depth},
          {"m", c.search.fanout},     {"lambda", c.search.reward.lambda},
          {"delta", c.delta},         {"T", c.max_turns},
          {"tau", c.tau},             {"beta", c.beta},
          {"gamma", c.gamma},         {"seed", c.search.rng_seed}};
}

}  // namespace inquire
