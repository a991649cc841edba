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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quarl/backend.hpp"
#include "quarl/cartpole.hpp"
#include "quarl/circuit.hpp"
#include "quarl/policy.hpp"

namespace quarl {

enum class OptimizerKind { Adam, Sgd };

/// How returns weight the per-step log-policy gradients.
enum class ReturnMode {
    Episode,     // G * sum_t grad log pi(a_t|s_t)
    RewardToGo,  // sum_t G_t * grad log pi(a_t|s_t)
};

struct LearningRates {
    double phi = 0.01;
    double omega = 0.1;
    double lambda = 0.1;
};

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

/// Best CartPole architecture found by the two-objective search.
inline constexpr const char* kReferenceGenome = "3-1-1-2-1-1-3-1-3-2-1-2-0";

struct TrainConfig {
    Genome genome;
    std::size_t n_qubits = 4;
    std::size_t n_trajectories = 10;
    std::size_t episode_cap = cartpole::kDefaultEpisodeCap;
    std::size_t episodes = 500;
    double gamma = 1.0;
    double beta = 1.0;
    LearningRates lr;
    OptimizerKind optimizer = OptimizerKind::Adam;
    AdamSettings adam;
    ReturnMode return_mode = ReturnMode::RewardToGo;
    EncodeSquash squash = EncodeSquash::None;
    BackendDescriptor backend;
    std::uint64_t seed = 0;
    std::size_t retries = 3;
    /// Stop once the 5-episode moving average reaches this value; 0 disables.
    double stop_moving_average = 0.0;

    /// Throws std::invalid_argument.
    void validate() const;
    PolicyModel model() const;
};

struct TrajectoryStep {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    ActionDistribution device_probs;
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;

    std::size_t size() const { return steps.size(); }
    std::vector<double> rewards() const;
    double total_reward() const;
};

struct ParamDelta {
    std::vector<double> dphi;
    std::vector<double> dlambda;
    std::vector<double> domega;
    std::size_t clamped_steps = 0;
    std::vector<std::size_t> clamped_per_trajectory;
};

struct AdamMoments {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;
};

struct OptimizerState {
    AdamMoments phi;
    AdamMoments lambda;
    AdamMoments omega;
};

struct EpisodeMetrics {
    std::size_t episode = 0;
    double reward = 0.0;
    double moving_avg5 = 0.0;
    std::size_t clamped_steps = 0;
    double wallclock_ms = 0.0;
};

/// sum_t gamma^t r_{t+1}
double discounted_return(std::span<const double> rewards, double gamma);

/// Runs at most `max_steps` steps from the environment's current state. Action
/// probabilities come from `backend`; they are stored with each step.
Trajectory collect_trajectory(const PolicyModel& model, const PolicyParams& params, cartpole::Environment& env,
                              const Backend& backend, std::size_t max_steps, std::uint64_t seed);

/// (1/N) sum_i G_i z_i with z_i = sum_t grad log(pi_sim + eps) at the stored device probabilities.
ParamDelta compute_update(std::span<const Trajectory> trajectories, const PolicyModel& model,
                          const PolicyParams& params, double gamma, ReturnMode mode = ReturnMode::Episode);

/// Gradient ascent step with one optimizer per parameter group.
PolicyParams apply_update(const PolicyParams& params, const ParamDelta& delta, OptimizerState& state,
                          const TrainConfig& config);

struct TrainResult {
    PolicyParams params;
    std::vector<EpisodeMetrics> metrics;
};

using MetricsCallback = std::function<void(const EpisodeMetrics&)>;

/// Batch-collect then update until the episode budget is spent.
TrainResult train(const TrainConfig& config, const MetricsCallback& on_episode = {},
                  std::optional<PolicyParams> initial = std::nullopt);

/// Frozen-parameter rollouts; actions are still sampled from the policy.
std::vector<EpisodeMetrics> run_policy(const PolicyModel& model, const PolicyParams& params,
                                       const Backend& backend, std::size_t episodes, std::size_t episode_cap,
                                       std::uint64_t seed, const MetricsCallback& on_episode = {});

/// Fills moving_avg5 over the trailing window of up to five episodes.
void fill_moving_average(std::vector<EpisodeMetrics>& metrics);

struct Checkpoint {
    Genome genome;
    std::size_t n_qubits = 4;
    PolicyParams params;
    std::size_t episode = 0;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
/// Throws std::runtime_error when the file is missing or malformed.
Checkpoint read_checkpoint(const std::string& path);

inline constexpr const char* kMetricsHeader = "episode,reward,moving_avg5,clamped_steps,wallclock_ms";
void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> metrics);
void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> metrics);

}  // namespace quarl
