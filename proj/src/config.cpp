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

#include "quarl/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace quarl {

namespace {

using nlohmann::json;

struct Field {
    std::function<void(RunConfig&, const json&)> set;
    std::function<json(const RunConfig&)> get;
};

[[noreturn]] void type_error(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' must be " + expected);
}

template <typename T>
Field unsigned_field(T RunConfig::*member, const std::string& key) {
    return {[member, key](RunConfig& c, const json& v) {
                if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                    type_error(key, "a non-negative integer");
                }
                c.*member = v.get<T>();
            },
            [member](const RunConfig& c) { return json(c.*member); }};
}

Field real_field(double RunConfig::*member, const std::string& key) {
    return {[member, key](RunConfig& c, const json& v) {
                if (!v.is_number()) {
                    type_error(key, "a number");
                }
                c.*member = v.get<double>();
            },
            [member](const RunConfig& c) { return json(c.*member); }};
}

Field string_field(std::string RunConfig::*member, const std::string& key) {
    return {[member, key](RunConfig& c, const json& v) {
                if (!v.is_string()) {
                    type_error(key, "a string");
                }
                c.*member = v.get<std::string>();
            },
            [member](const RunConfig& c) { return json(c.*member); }};
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["genome"] = {[](RunConfig& c, const json& v) {
                           if (v.is_null()) {
                               c.genome.reset();
                           } else if (v.is_string()) {
                               c.genome = v.get<std::string>();
                           } else {
                               type_error("genome", "a string or null");
                           }
                       },
                       [](const RunConfig& c) { return c.genome ? json(*c.genome) : json(nullptr); }};
        t["n_qubits"] = unsigned_field(&RunConfig::n_qubits, "n_qubits");
        t["backend"] = string_field(&RunConfig::backend, "backend");
        t["shots"] = unsigned_field(&RunConfig::shots, "shots");
        t["noise_p1"] = real_field(&RunConfig::noise_p1, "noise_p1");
        t["noise_p2"] = real_field(&RunConfig::noise_p2, "noise_p2");
        t["endpoint"] = string_field(&RunConfig::endpoint, "endpoint");
        t["poll_interval_ms"] = unsigned_field(&RunConfig::poll_interval_ms, "poll_interval_ms");
        t["timeout_ms"] = unsigned_field(&RunConfig::timeout_ms, "timeout_ms");
        t["lr_phi"] = real_field(&RunConfig::lr_phi, "lr_phi");
        t["lr_omega"] = real_field(&RunConfig::lr_omega, "lr_omega");
        t["lr_lambda"] = real_field(&RunConfig::lr_lambda, "lr_lambda");
        t["gamma"] = real_field(&RunConfig::gamma, "gamma");
        t["beta"] = real_field(&RunConfig::beta, "beta");
        t["optimizer"] = string_field(&RunConfig::optimizer, "optimizer");
        t["return_mode"] = string_field(&RunConfig::return_mode, "return_mode");
        t["encode_squash"] = string_field(&RunConfig::encode_squash, "encode_squash");
        t["n_trajectories"] = unsigned_field(&RunConfig::n_trajectories, "n_trajectories");
        t["episodes"] = unsigned_field(&RunConfig::episodes, "episodes");
        t["episode_cap"] = unsigned_field(&RunConfig::episode_cap, "episode_cap");
        t["retries"] = unsigned_field(&RunConfig::retries, "retries");
        t["stop_moving_average"] = real_field(&RunConfig::stop_moving_average, "stop_moving_average");
        t["seed"] = unsigned_field(&RunConfig::seed, "seed");
        t["out"] = string_field(&RunConfig::out, "out");
        t["checkpoint"] = string_field(&RunConfig::checkpoint, "checkpoint");
        t["population"] = unsigned_field(&RunConfig::population, "population");
        t["generations"] = unsigned_field(&RunConfig::generations, "generations");
        t["eval_episodes"] = unsigned_field(&RunConfig::eval_episodes, "eval_episodes");
        t["eval_seeds"] = unsigned_field(&RunConfig::eval_seeds, "eval_seeds");
        t["crossover_prob"] = real_field(&RunConfig::crossover_prob, "crossover_prob");
        t["mutation_prob"] = real_field(&RunConfig::mutation_prob, "mutation_prob");
        t["workers"] = unsigned_field(&RunConfig::workers, "workers");
        return t;
    }();
    return table;
}

}  // namespace

void apply_json(RunConfig& config, const json& patch) {
    if (!patch.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    // Validate every key first so a failed overlay leaves `config` untouched.
    RunConfig updated = config;
    for (const auto& [key, value] : patch.items()) {
        const auto it = fields().find(key);
        if (it == fields().end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        it->second.set(updated, value);
    }
    config = std::move(updated);
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
}

json to_json(const RunConfig& config) {
    json j = json::object();
    for (const auto& [key, field] : fields()) {
        j[key] = field.get(config);
    }
    return j;
}

BackendDescriptor to_backend_descriptor(const RunConfig& config, const std::string& token) {
    BackendDescriptor d;
    try {
        d.kind = parse_backend_kind(config.backend);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    d.shots = config.shots;
    d.noise = {config.noise_p1, config.noise_p2};
    d.endpoint = config.endpoint;
    d.token = token;
    d.poll_interval = std::chrono::milliseconds(config.poll_interval_ms);
    d.timeout = std::chrono::milliseconds(config.timeout_ms);
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return d;
}

TrainConfig to_train_config(const RunConfig& config, const std::string& token) {
    TrainConfig t;
    if (config.genome) {
        try {
            t.genome = parse_genome(*config.genome);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    t.n_qubits = config.n_qubits;
    t.n_trajectories = config.n_trajectories;
    t.episode_cap = config.episode_cap;
    t.episodes = config.episodes;
    t.gamma = config.gamma;
    t.beta = config.beta;
    t.lr = {config.lr_phi, config.lr_omega, config.lr_lambda};
    if (config.optimizer == "adam") {
        t.optimizer = OptimizerKind::Adam;
    } else if (config.optimizer == "sgd") {
        t.optimizer = OptimizerKind::Sgd;
    } else {
        throw ConfigError("optimizer must be adam or sgd, got '" + config.optimizer + "'");
    }
    if (config.return_mode == "episode") {
        t.return_mode = ReturnMode::Episode;
    } else if (config.return_mode == "reward_to_go") {
        t.return_mode = ReturnMode::RewardToGo;
    } else {
        throw ConfigError("return_mode must be episode or reward_to_go, got '" + config.return_mode + "'");
    }
    if (config.encode_squash == "none") {
        t.squash = EncodeSquash::None;
    } else if (config.encode_squash == "arctan") {
        t.squash = EncodeSquash::Arctan;
    } else {
        throw ConfigError("encode_squash must be none or arctan, got '" + config.encode_squash + "'");
    }
    t.backend = to_backend_descriptor(config, token);
    t.seed = config.seed;
    t.retries = config.retries;
    t.stop_moving_average = config.stop_moving_average;
    if (config.genome) {
        try {
            t.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return t;
}

nsga2::SearchConfig to_search_config(const RunConfig& config) {
    RunConfig base = config;
    base.genome.reset();
    nsga2::SearchConfig s;
    s.population = config.population;
    s.generations = config.generations;
    s.crossover_prob = config.crossover_prob;
    s.mutation_prob = config.mutation_prob;
    s.eval_episodes = config.eval_episodes;
    s.eval_seeds = config.eval_seeds;
    s.seed = config.seed;
    s.workers = config.workers;
    s.train = to_train_config(base);
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

}  // namespace quarl
