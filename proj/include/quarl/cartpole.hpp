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

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace quarl::cartpole {

inline constexpr double kGravity = 9.8;
inline constexpr double kCartMass = 1.0;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kHalfLength = 0.5;
inline constexpr double kForce = 10.0;
inline constexpr double kTau = 0.02;
inline constexpr double kXLimit = 2.4;
inline constexpr double kThetaLimit = 12.0 * 2.0 * std::numbers::pi / 360.0;
inline constexpr std::size_t kDefaultEpisodeCap = 500;

struct CartState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;

    bool operator==(const CartState&) const = default;

    std::array<double, 4> as_array() const { return {x, x_dot, theta, theta_dot}; }
};

struct StepResult {
    CartState next;
    double reward = 1.0;
    bool terminated = false;
    bool truncated = false;
};

/// Outside the position or angle bounds.
bool out_of_bounds(const CartState& s);

/// One explicit Euler step of the CartPole-v1 dynamics. Throws std::invalid_argument
/// for an action other than 0 (push left) or 1 (push right). Never truncates.
StepResult step(const CartState& state, int action);

/// Each component uniform in [-0.05, 0.05], deterministic per seed.
CartState reset(std::uint64_t seed);

/// Episode wrapper adding the step counter and truncation cap.
class Environment {
  public:
    explicit Environment(std::size_t episode_cap = kDefaultEpisodeCap);

    const CartState& reset(std::uint64_t seed);
    /// Starts an episode from an explicit state.
    void set_state(const CartState& state);
    /// Throws std::logic_error once the episode has ended.
    StepResult step(int action);

    const CartState& state() const { return state_; }
    std::size_t steps() const { return steps_; }
    std::size_t episode_cap() const { return cap_; }
    bool done() const { return done_; }

  private:
    std::size_t cap_;
    CartState state_;
    std::size_t steps_ = 0;
    bool done_ = false;
};

}  // namespace quarl::cartpole
