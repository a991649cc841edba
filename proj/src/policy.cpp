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

#include "quarl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace quarl {

void PolicyModel::check(const PolicyParams& params) const {
    auto expect = [](const char* name, std::size_t got, std::size_t want) {
        if (got != want) {
            throw std::invalid_argument(std::string("policy parameter ") + name + " has length " +
                                        std::to_string(got) + ", expected " + std::to_string(want));
        }
    };
    expect("phi", params.phi.size(), ir.n_phi);
    expect("lambda", params.lambda.size(), ir.n_lambda);
    expect("omega", params.omega.size(), n_actions);
    if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
        throw std::invalid_argument("policy beta must be finite and non-negative");
    }
}

PolicyParams init_params(const PolicyModel& model, std::uint64_t seed, double beta) {
    Rng rng(seed);
    PolicyParams p;
    p.phi.resize(model.ir.n_phi);
    for (double& v : p.phi) {
        v = uniform(rng, -std::numbers::pi, std::numbers::pi);
    }
    p.lambda.assign(model.ir.n_lambda, 1.0);
    p.omega.assign(model.n_actions, 1.0);
    p.beta = beta;
    return p;
}

std::vector<double> weighted_expectations(const PolicyModel& model, const PolicyParams& params,
                                          std::span<const double> state, const Backend& backend,
                                          std::uint64_t seed) {
    model.check(params);
    const BoundCircuit circuit = bind_parameters(model.ir, params.phi, params.lambda, state, model.squash);
    double e = 0.0;
    try {
        e = backend.execute(circuit, seed);
    } catch (const BackendError& err) {
        throw BackendError(std::string("policy readout on ") + backend_name(backend.kind()) +
                               " backend failed: " + err.what(),
                           err.job_id());
    }
    std::vector<double> out(params.omega.size());
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = e * params.omega[a];
    }
    return out;
}

ActionDistribution action_probs(std::span<const double> weighted, double beta) {
    if (weighted.empty()) {
        throw std::invalid_argument("action_probs: no actions");
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (double w : weighted) {
        if (!std::isfinite(w)) {
            throw std::invalid_argument("action_probs: non-finite logit");
        }
        peak = std::max(peak, beta * w);
    }
    ActionDistribution d;
    d.probs.resize(weighted.size());
    double total = 0.0;
    for (std::size_t a = 0; a < weighted.size(); ++a) {
        d.probs[a] = std::exp(beta * weighted[a] - peak);
        total += d.probs[a];
    }
    for (double& p : d.probs) {
        p /= total;
    }
    return d;
}

ActionDistribution exact_action_probs(const PolicyModel& model, const PolicyParams& params,
                                      std::span<const double> state) {
    const ExactBackend exact(model.observable);
    const std::vector<double> w = weighted_expectations(model, params, state, exact, 0);
    return action_probs(w, params.beta);
}

std::size_t sample_action(const ActionDistribution& dist, Rng& rng) {
    const double u = uniform01(rng);
    double running = 0.0;
    for (std::size_t a = 0; a < dist.probs.size(); ++a) {
        running += dist.probs[a];
        if (u < running) {
            return a;
        }
    }
    // Rounding left u above the final partial sum; take the last action with mass.
    for (std::size_t a = dist.probs.size(); a-- > 0;) {
        if (dist.probs[a] > 0.0) {
            return a;
        }
    }
    return 0;
}

std::size_t sample_action(const ActionDistribution& dist, std::uint64_t seed) {
    Rng rng(seed);
    return sample_action(dist, rng);
}

PolicyGradient log_prob_gradient(const PolicyModel& model, const PolicyParams& params,
                                 std::span<const double> state, std::size_t action,
                                 const ActionDistribution& device_probs) {
    model.check(params);
    if (action >= model.n_actions) {
        throw std::invalid_argument("log_prob_gradient: action index out of range");
    }
    if (device_probs.probs.size() != model.n_actions) {
        throw std::invalid_argument("log_prob_gradient: device distribution has wrong size");
    }

    const ExpectationWithGradient readout =
        parameter_shift(model.ir, params.phi, params.lambda, state, model.observable, model.squash);
    const double e = readout.value;

    std::vector<double> weighted(model.n_actions);
    for (std::size_t b = 0; b < model.n_actions; ++b) {
        weighted[b] = e * params.omega[b];
    }
    const ActionDistribution sim = action_probs(weighted, params.beta);
    const double pa = sim.probs[action];

    PolicyGradient g;
    double denom = device_probs.probs[action];
    if (!(denom >= kDeviceProbFloor)) {
        denom = kDeviceProbFloor;
        g.clamped = true;
    }
    // d pi_a / d w_b = beta * pi_a * (delta_ab - pi_b)
    double mean_omega = 0.0;
    for (std::size_t b = 0; b < model.n_actions; ++b) {
        mean_omega += sim.probs[b] * params.omega[b];
    }
    const double ratio = pa / denom;
    const double de = params.beta * ratio * (params.omega[action] - mean_omega);

    g.dphi.resize(readout.grad.dphi.size());
    for (std::size_t k = 0; k < g.dphi.size(); ++k) {
        g.dphi[k] = de * readout.grad.dphi[k];
    }
    g.dlambda.resize(readout.grad.dlambda.size());
    for (std::size_t k = 0; k < g.dlambda.size(); ++k) {
        g.dlambda[k] = de * readout.grad.dlambda[k];
    }
    g.domega.resize(model.n_actions);
    for (std::size_t b = 0; b < model.n_actions; ++b) {
        const double delta = b == action ? 1.0 : 0.0;
        g.domega[b] = params.beta * ratio * (delta - sim.probs[b]) * e;
    }
    return g;
}

}  // namespace quarl
