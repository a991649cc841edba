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

#include "quarl/cartpole.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "quarl/random.hpp"

namespace quarl::cartpole {

bool out_of_bounds(const CartState& s) {
    return s.x < -kXLimit || s.x > kXLimit || s.theta < -kThetaLimit || s.theta > kThetaLimit;
}

StepResult step(const CartState& s, int action) {
    if (action != 0 && action != 1) {
        throw std::invalid_argument("cartpole: invalid action " + std::to_string(action));
    }
    constexpr double total_mass = kCartMass + kPoleMass;
    constexpr double pole_moment = kPoleMass * kHalfLength;

    const double force = action == 1 ? kForce : -kForce;
    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);
    const double temp = (force + pole_moment * s.theta_dot * s.theta_dot * sin_t) / total_mass;
    const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                             (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_moment * theta_acc * cos_t / total_mass;

    StepResult r;
    r.next.x = s.x + kTau * s.x_dot;
    r.next.x_dot = s.x_dot + kTau * x_acc;
    r.next.theta = s.theta + kTau * s.theta_dot;
    r.next.theta_dot = s.theta_dot + kTau * theta_acc;
    r.reward = 1.0;
    r.terminated = out_of_bounds(r.next);
    return r;
}

CartState reset(std::uint64_t seed) {
    Rng rng(seed);
    CartState s;
    s.x = uniform(rng, -0.05, 0.05);
    s.x_dot = uniform(rng, -0.05, 0.05);
    s.theta = uniform(rng, -0.05, 0.05);
    s.theta_dot = uniform(rng, -0.05, 0.05);
    return s;
}

Environment::Environment(std::size_t episode_cap) : cap_(episode_cap) {
    if (cap_ == 0) {
        throw std::invalid_argument("cartpole: episode cap must be >= 1");
    }
}

const CartState& Environment::reset(std::uint64_t seed) {
    set_state(cartpole::reset(seed));
    return state_;
}

void Environment::set_state(const CartState& state) {
    state_ = state;
    steps_ = 0;
    done_ = out_of_bounds(state);
}

StepResult Environment::step(int action) {
    if (done_) {
        throw std::logic_error("cartpole: step called on a finished episode");
    }
    StepResult r = cartpole::step(state_, action);
    state_ = r.next;
    ++steps_;
    r.truncated = !r.terminated && steps_ >= cap_;
    done_ = r.terminated || r.truncated;
    return r;
}

}  // namespace quarl::cartpole
