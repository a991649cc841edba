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

#include "quarl/reinforce.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "quarl/random.hpp"

namespace quarl {

namespace {

// Seed streams derived from TrainConfig::seed.
constexpr std::uint64_t kInitStream = 0x1000;
constexpr std::uint64_t kEpisodeStream = 0x2000;

constexpr std::size_t kMovingWindow = 5;

}  // namespace

void TrainConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("gamma must lie in [0, 1]");
    }
    if (!(lr.phi > 0.0 && lr.omega > 0.0 && lr.lambda > 0.0)) {
        throw std::invalid_argument("learning rates must be positive");
    }
    if (n_trajectories == 0) {
        throw std::invalid_argument("n_trajectories must be >= 1");
    }
    if (episode_cap == 0) {
        throw std::invalid_argument("episode_cap must be >= 1");
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("beta must be finite and non-negative");
    }
    if (n_qubits != 4) {
        // CartPole has four observation features, one per encoding qubit.
        throw std::invalid_argument("CartPole policies need n_qubits = 4, got " + std::to_string(n_qubits));
    }
    backend.validate();
}

PolicyModel TrainConfig::model() const {
    PolicyModel m;
    m.ir = decode_genome(genome, n_qubits);
    m.observable = PauliZString::all(n_qubits);
    m.n_actions = 2;
    m.squash = squash;
    return m;
}

std::vector<double> Trajectory::rewards() const {
    std::vector<double> r(steps.size());
    std::transform(steps.begin(), steps.end(), r.begin(), [](const TrajectoryStep& s) { return s.reward; });
    return r;
}

double Trajectory::total_reward() const {
    double total = 0.0;
    for (const TrajectoryStep& s : steps) {
        total += s.reward;
    }
    return total;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double g = 0.0;
    double discount = 1.0;
    for (double r : rewards) {
        g += discount * r;
        discount *= gamma;
    }
    return g;
}

Trajectory collect_trajectory(const PolicyModel& model, const PolicyParams& params, cartpole::Environment& env,
                              const Backend& backend, std::size_t max_steps, std::uint64_t seed) {
    Trajectory traj;
    Rng rng(seed);
    for (std::size_t t = 0; t < max_steps && !env.done(); ++t) {
        const std::array<double, 4> s = env.state().as_array();
        const std::vector<double> w =
            weighted_expectations(model, params, s, backend, derive_seed(seed, t + 1));
        ActionDistribution probs = action_probs(w, params.beta);
        const std::size_t action = sample_action(probs, rng);
        const cartpole::StepResult r = env.step(static_cast<int>(action));
        traj.steps.push_back({std::vector<double>(s.begin(), s.end()), action, r.reward, std::move(probs)});
    }
    return traj;
}

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] += a * x[k];
    }
}

}  // namespace

ParamDelta compute_update(std::span<const Trajectory> trajectories, const PolicyModel& model,
                          const PolicyParams& params, double gamma, ReturnMode mode) {
    if (trajectories.empty()) {
        throw std::invalid_argument("compute_update: need at least one trajectory");
    }
    model.check(params);
    ParamDelta delta;
    delta.dphi.assign(params.phi.size(), 0.0);
    delta.dlambda.assign(params.lambda.size(), 0.0);
    delta.domega.assign(params.omega.size(), 0.0);

    for (const Trajectory& traj : trajectories) {
        const std::vector<double> rewards = traj.rewards();
        const double episode_return = discounted_return(rewards, gamma);

        // Reward-to-go, G_t = sum_k gamma^k r_{t+k+1}.
        std::vector<double> to_go(rewards.size(), 0.0);
        double acc = 0.0;
        for (std::size_t t = rewards.size(); t-- > 0;) {
            acc = rewards[t] + gamma * acc;
            to_go[t] = acc;
        }

        ParamDelta z;
        z.dphi.assign(params.phi.size(), 0.0);
        z.dlambda.assign(params.lambda.size(), 0.0);
        z.domega.assign(params.omega.size(), 0.0);
        std::size_t clamped = 0;
        for (std::size_t t = 0; t < traj.steps.size(); ++t) {
            const TrajectoryStep& step = traj.steps[t];
            const PolicyGradient g = log_prob_gradient(model, params, step.state, step.action, step.device_probs);
            const double weight = mode == ReturnMode::Episode ? 1.0 : to_go[t];
            axpy(z.dphi, weight, g.dphi);
            axpy(z.dlambda, weight, g.dlambda);
            axpy(z.domega, weight, g.domega);
            clamped += g.clamped ? 1 : 0;
        }
        const double scale = (mode == ReturnMode::Episode ? episode_return : 1.0) /
                             static_cast<double>(trajectories.size());
        axpy(delta.dphi, scale, z.dphi);
        axpy(delta.dlambda, scale, z.dlambda);
        axpy(delta.domega, scale, z.domega);
        delta.clamped_steps += clamped;
        delta.clamped_per_trajectory.push_back(clamped);
    }
    return delta;
}

namespace {

void ascend(std::vector<double>& theta, const std::vector<double>& grad, double lr, AdamMoments& moments,
            const TrainConfig& config) {
    if (grad.size() != theta.size()) {
        throw std::invalid_argument("apply_update: gradient has length " + std::to_string(grad.size()) +
                                    ", parameters have " + std::to_string(theta.size()));
    }
    if (config.optimizer == OptimizerKind::Sgd) {
        for (std::size_t k = 0; k < theta.size(); ++k) {
            theta[k] += lr * grad[k];
        }
        return;
    }
    if (moments.m.empty()) {
        moments.m.assign(theta.size(), 0.0);
        moments.v.assign(theta.size(), 0.0);
    }
    if (moments.m.size() != theta.size()) {
        throw std::invalid_argument("apply_update: optimizer state shape mismatch");
    }
    const AdamSettings& a = config.adam;
    ++moments.t;
    const double bias1 = 1.0 - std::pow(a.beta1, static_cast<double>(moments.t));
    const double bias2 = 1.0 - std::pow(a.beta2, static_cast<double>(moments.t));
    for (std::size_t k = 0; k < theta.size(); ++k) {
        moments.m[k] = a.beta1 * moments.m[k] + (1.0 - a.beta1) * grad[k];
        moments.v[k] = a.beta2 * moments.v[k] + (1.0 - a.beta2) * grad[k] * grad[k];
        const double m_hat = moments.m[k] / bias1;
        const double v_hat = moments.v[k] / bias2;
        theta[k] += lr * m_hat / (std::sqrt(v_hat) + a.epsilon);
    }
}

}  // namespace

PolicyParams apply_update(const PolicyParams& params, const ParamDelta& delta, OptimizerState& state,
                          const TrainConfig& config) {
    PolicyParams next = params;
    ascend(next.phi, delta.dphi, config.lr.phi, state.phi, config);
    ascend(next.lambda, delta.dlambda, config.lr.lambda, state.lambda, config);
    ascend(next.omega, delta.domega, config.lr.omega, state.omega, config);
    return next;
}

void fill_moving_average(std::vector<EpisodeMetrics>& metrics) {
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        const std::size_t first = i + 1 >= kMovingWindow ? i + 1 - kMovingWindow : 0;
        double sum = 0.0;
        for (std::size_t j = first; j <= i; ++j) {
            sum += metrics[j].reward;
        }
        metrics[i].moving_avg5 = sum / static_cast<double>(i + 1 - first);
    }
}

namespace {

double trailing_average(const std::vector<EpisodeMetrics>& metrics, double latest) {
    const std::size_t n = std::min(metrics.size(), kMovingWindow - 1);
    double sum = latest;
    for (std::size_t j = metrics.size() - n; j < metrics.size(); ++j) {
        sum += metrics[j].reward;
    }
    return sum / static_cast<double>(n + 1);
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TrainResult train(const TrainConfig& config, const MetricsCallback& on_episode,
                  std::optional<PolicyParams> initial) {
    config.validate();
    const PolicyModel model = config.model();
    TrainResult result;
    result.params = initial ? std::move(*initial) : init_params(model, derive_seed(config.seed, kInitStream), config.beta);
    model.check(result.params);
    if (config.episodes == 0) {
        return result;
    }

    const std::unique_ptr<Backend> backend = make_backend(config.backend, model.observable);
    cartpole::Environment env(config.episode_cap);
    OptimizerState optimizer;
    const auto start = std::chrono::steady_clock::now();

    std::size_t episode = 0;
    bool reached = false;
    while (episode < config.episodes && !reached) {
        const std::size_t batch = std::min(config.n_trajectories, config.episodes - episode);
        std::vector<Trajectory> trajectories;
        trajectories.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) {
            const std::uint64_t episode_seed = derive_seed(config.seed, kEpisodeStream + episode + i);
            for (std::size_t attempt = 0;; ++attempt) {
                try {
                    env.reset(derive_seed(episode_seed, 0));
                    trajectories.push_back(collect_trajectory(model, result.params, env, *backend,
                                                              config.episode_cap, derive_seed(episode_seed, 1)));
                    break;
                } catch (const BackendError& err) {
                    if (attempt >= config.retries) {
                        throw BackendError("episode " + std::to_string(episode + i) + " failed after " +
                                               std::to_string(attempt + 1) + " attempts: " + err.what(),
                                           err.job_id());
                    }
                }
            }
        }

        const ParamDelta delta = compute_update(trajectories, model, result.params, config.gamma, config.return_mode);
        result.params = apply_update(result.params, delta, optimizer, config);

        for (std::size_t i = 0; i < batch; ++i) {
            EpisodeMetrics m;
            m.episode = episode + i;
            m.reward = trajectories[i].total_reward();
            m.moving_avg5 = trailing_average(result.metrics, m.reward);
            m.clamped_steps = delta.clamped_per_trajectory[i];
            m.wallclock_ms = elapsed_ms(start);
            result.metrics.push_back(m);
            if (on_episode) {
                on_episode(m);
            }
            if (config.stop_moving_average > 0.0 && m.moving_avg5 >= config.stop_moving_average) {
                reached = true;
            }
        }
        episode += batch;
    }
    return result;
}

std::vector<EpisodeMetrics> run_policy(const PolicyModel& model, const PolicyParams& params,
                                       const Backend& backend, std::size_t episodes, std::size_t episode_cap,
                                       std::uint64_t seed, const MetricsCallback& on_episode) {
    model.check(params);
    cartpole::Environment env(episode_cap);
    std::vector<EpisodeMetrics> metrics;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t e = 0; e < episodes; ++e) {
        const std::uint64_t episode_seed = derive_seed(seed, kEpisodeStream + e);
        env.reset(derive_seed(episode_seed, 0));
        const Trajectory traj =
            collect_trajectory(model, params, env, backend, episode_cap, derive_seed(episode_seed, 1));
        EpisodeMetrics m;
        m.episode = e;
        m.reward = traj.total_reward();
        m.moving_avg5 = trailing_average(metrics, m.reward);
        m.wallclock_ms = elapsed_ms(start);
        metrics.push_back(m);
        if (on_episode) {
            on_episode(m);
        }
    }
    return metrics;
}

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    const nlohmann::json j = {
        {"genome", format_genome(checkpoint.genome)},
        {"n_qubits", checkpoint.n_qubits},
        {"phi", checkpoint.params.phi},
        {"lambda", checkpoint.params.lambda},
        {"omega", checkpoint.params.omega},
        {"beta", checkpoint.params.beta},
        {"episode", checkpoint.episode},
    };
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint " + path);
    }
    out << j.dump(2) << "\n";
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read checkpoint " + path);
    }
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        Checkpoint c;
        c.genome = parse_genome(j.at("genome").get<std::string>());
        c.n_qubits = j.at("n_qubits").get<std::size_t>();
        c.params.phi = j.at("phi").get<std::vector<double>>();
        c.params.lambda = j.at("lambda").get<std::vector<double>>();
        c.params.omega = j.at("omega").get<std::vector<double>>();
        c.params.beta = j.at("beta").get<double>();
        c.episode = j.at("episode").get<std::size_t>();
        return c;
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
}

void write_metrics_csv(std::ostream& out, std::span<const EpisodeMetrics> metrics) {
    out << kMetricsHeader << "\n";
    for (const EpisodeMetrics& m : metrics) {
        out << m.episode << "," << m.reward << "," << m.moving_avg5 << "," << m.clamped_steps << ","
            << static_cast<long long>(std::llround(m.wallclock_ms)) << "\n";
    }
}

void write_metrics_csv(const std::string& path, std::span<const EpisodeMetrics> metrics) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write metrics " + path);
    }
    write_metrics_csv(out, metrics);
}

}  // namespace quarl
