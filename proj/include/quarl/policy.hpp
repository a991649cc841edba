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
#include <span>
#include <vector>

#include "quarl/backend.hpp"
#include "quarl/circuit.hpp"
#include "quarl/random.hpp"
#include "quarl/statevector.hpp"

namespace quarl {

/// Trainable policy parameters plus the (fixed) inverse temperature.
struct PolicyParams {
    std::vector<double> phi;     // rotation angles, radians
    std::vector<double> lambda;  // input scalings
    std::vector<double> omega;   // per-action observable weights
    double beta = 1.0;

    bool operator==(const PolicyParams&) const = default;
};

struct ActionDistribution {
    std::vector<double> probs;
};

/// Everything about the policy that is not trained: architecture, readout, encoding.
struct PolicyModel {
    CircuitIR ir;
    PauliZString observable;
    std::size_t n_actions = 2;
    EncodeSquash squash = EncodeSquash::None;

    /// Throws std::invalid_argument if params do not fit this model.
    void check(const PolicyParams& params) const;
};

/// phi ~ U(-pi, pi), lambda = 1, omega = 1.
PolicyParams init_params(const PolicyModel& model, std::uint64_t seed, double beta = 1.0);

/// [<O> * omega_a for each action], with <O> evaluated once on `backend`.
std::vector<double> weighted_expectations(const PolicyModel& model, const PolicyParams& params,
                                          std::span<const double> state, const Backend& backend,
                                          std::uint64_t seed);

/// Softmax of beta * weighted, with max subtraction.
ActionDistribution action_probs(std::span<const double> weighted, double beta);

/// Policy probabilities under exact simulation.
ActionDistribution exact_action_probs(const PolicyModel& model, const PolicyParams& params,
                                      std::span<const double> state);

/// Inverse-CDF draw.
std::size_t sample_action(const ActionDistribution& dist, Rng& rng);
std::size_t sample_action(const ActionDistribution& dist, std::uint64_t seed);

constexpr double kDeviceProbFloor = 1e-6;

struct PolicyGradient {
    std::vector<double> dphi;
    std::vector<double> dlambda;
    std::vector<double> domega;
    /// Set when the device probability of the taken action was raised to kDeviceProbFloor.
    bool clamped = false;
};

/// grad pi_sim(a|s) / pi_device(a|s), where pi_sim is differentiated on the exact
/// simulator and pi_device = pi_sim + eps is held constant. With device_probs equal
/// to the simulator probabilities this is grad log pi_sim(a|s).
PolicyGradient log_prob_gradient(const PolicyModel& model, const PolicyParams& params,
                                 std::span<const double> state, std::size_t action,
                                 const ActionDistribution& device_probs);

}  // namespace quarl
