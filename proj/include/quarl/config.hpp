// Copyright 2026 The quarl Authors
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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "quarl/backend.hpp"
#include "quarl/nsga2.hpp"
#include "quarl/reinforce.hpp"

namespace quarl {

/// Bad key, bad value type or out-of-range setting in a run configuration.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat run configuration shared by all subcommands. Built from defaults, then
/// a JSON file, then flag overrides, each layer replacing the previous one.
struct RunConfig {
    std::optional<std::string> genome;
    std::size_t n_qubits = 4;

    std::string backend = "exact";
    std::uint64_t shots = kDefaultShots;
    double noise_p1 = 0.0;
    double noise_p2 = 0.0;
    std::string endpoint;
    std::uint64_t poll_interval_ms = 5;
    std::uint64_t timeout_ms = 30000;

    double lr_phi = 0.01;
    double lr_omega = 0.1;
    double lr_lambda = 0.1;
    double gamma = 1.0;
    double beta = 1.0;
    std::string optimizer = "adam";
    std::string return_mode = "reward_to_go";
    std::string encode_squash = "none";
    std::size_t n_trajectories = 10;
    std::size_t episodes = 500;
    std::size_t episode_cap = cartpole::kDefaultEpisodeCap;
    std::size_t retries = 3;
    double stop_moving_average = 0.0;

    std::uint64_t seed = 0;
    std::string out = ".";
    std::string checkpoint;

    std::size_t population = 20;
    std::size_t generations = 10;
    std::size_t eval_episodes = 150;
    std::size_t eval_seeds = 2;
    double crossover_prob = 0.9;
    double mutation_prob = -1.0;
    std::size_t workers = 1;
};

/// Overlays the keys of `patch` onto `config`. Throws ConfigError on unknown
/// keys or mistyped values.
void apply_json(RunConfig& config, const nlohmann::json& patch);

/// Throws ConfigError when the file is unreadable or invalid.
nlohmann::json read_config_file(const std::string& path);

/// Every key, suitable for a resolved-config record. An unset genome is null.
nlohmann::json to_json(const RunConfig& config);

/// Converts and validates; the credential, if any, comes from `token`.
BackendDescriptor to_backend_descriptor(const RunConfig& config, const std::string& token = {});
TrainConfig to_train_config(const RunConfig& config, const std::string& token = {});
nsga2::SearchConfig to_search_config(const RunConfig& config);

}  // namespace quarl
