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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "quarl/mock_server.hpp"
#include "reference_reinforce.hpp"
#include "test_util.hpp"

namespace quarl {
namespace {

TrainConfig reference_config() {
    TrainConfig c;
    c.genome = parse_genome(kReferenceGenome);
    return c;
}

PolicyParams random_params(Rng& rng, const PolicyModel& model) {
    return {testing::random_angles(rng, model.ir.n_phi), testing::random_vector(rng, model.ir.n_lambda, -1.5, 1.5),
            testing::random_vector(rng, 2, -2, 2), 1.0};
}

// Runs a few episodes of the given policy on the exact backend.
std::vector<Trajectory> exact_batch(const PolicyModel& model, const PolicyParams& params, std::size_t n,
                                    std::size_t cap, std::uint64_t seed) {
    const ExactBackend backend(model.observable);
    std::vector<Trajectory> batch;
    for (std::size_t i = 0; i < n; ++i) {
        cartpole::Environment env(cap);
        env.reset(derive_seed(seed, 2 * i));
        batch.push_back(collect_trajectory(model, params, env, backend, cap, derive_seed(seed, 2 * i + 1)));
    }
    return batch;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

TEST(DiscountedReturnTest, Examples) {
    const std::vector<double> fifty(50, 1.0), three(3, 1.0);
    EXPECT_DOUBLE_EQ(discounted_return(fifty, 1.0), 50.0);
    EXPECT_DOUBLE_EQ(discounted_return(three, 0.5), 1.75);
    EXPECT_DOUBLE_EQ(discounted_return({}, 0.9), 0.0);
}

TEST(TrainConfigTest, Validation) {
    TrainConfig c = reference_config();
    EXPECT_NO_THROW(c.validate());
    c.gamma = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = reference_config();
    c.lr.omega = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = reference_config();
    c.n_trajectories = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = reference_config();
    c.n_qubits = 3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(CollectTrajectoryTest, TerminalStartGivesEmptyTrajectory) {
    const TrainConfig c = reference_config();
    const PolicyModel model = c.model();
    cartpole::Environment env(500);
    env.set_state({2.5, 0, 0, 0});
    const Trajectory t =
        collect_trajectory(model, init_params(model, 1), env, ExactBackend(model.observable), 500, 3);
    EXPECT_EQ(t.size(), 0u);
    EXPECT_EQ(t.total_reward(), 0.0);
}

TEST(CollectTrajectoryTest, DeterministicOnExactBackend) {
    const PolicyModel model = reference_config().model();
    const PolicyParams p = init_params(model, 2);
    const auto a = exact_batch(model, p, 2, 100, 9);
    const auto b = exact_batch(model, p, 2, 100, 9);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].size(), b[i].size());
        for (std::size_t t = 0; t < a[i].size(); ++t) {
            EXPECT_EQ(a[i].steps[t].state, b[i].steps[t].state);
            EXPECT_EQ(a[i].steps[t].action, b[i].steps[t].action);
            EXPECT_EQ(a[i].steps[t].device_probs.probs, b[i].steps[t].device_probs.probs);
        }
    }
}

TEST(CollectTrajectoryTest, RespectsStepLimitAndStoresDeviceProbs) {
    const PolicyModel model = reference_config().model();
    const PolicyParams p = init_params(model, 2);
    cartpole::Environment env(500);
    env.reset(1);
    const Trajectory t = collect_trajectory(model, p, env, ExactBackend(model.observable), 3, 4);
    EXPECT_LE(t.size(), 3u);
    for (const TrajectoryStep& s : t.steps) {
        EXPECT_EQ(s.state.size(), 4u);
        EXPECT_EQ(s.reward, 1.0);
        ASSERT_EQ(s.device_probs.probs.size(), 2u);
        EXPECT_NEAR(s.device_probs.probs[0] + s.device_probs.probs[1], 1.0, 1e-12);
    }
}

TEST(CollectTrajectoryTest, UniformPolicyMatchesRandomPlay) {
    const PolicyModel model = reference_config().model();
    PolicyParams p = init_params(model, 5);
    p.beta = 0.0;
    const auto metrics = run_policy(model, p, ExactBackend(model.observable), 200, 500, 11);
    double mean = 0.0;
    for (const EpisodeMetrics& m : metrics) {
        mean += m.reward / 200.0;
    }
    EXPECT_GE(mean, 15.0);
    EXPECT_LE(mean, 30.0);
}

TEST(ComputeUpdateTest, ZeroReturnsGiveZeroUpdate) {
    Rng rng(3);
    const PolicyModel model = reference_config().model();
    const PolicyParams p = random_params(rng, model);
    std::vector<Trajectory> batch = exact_batch(model, p, 2, 20, 4);
    for (Trajectory& t : batch) {
        for (TrajectoryStep& s : t.steps) {
            s.reward = 0.0;
        }
    }
    for (ReturnMode mode : {ReturnMode::Episode, ReturnMode::RewardToGo}) {
        const ParamDelta d = compute_update(batch, model, p, 1.0, mode);
        for (const auto* v : {&d.dphi, &d.dlambda, &d.domega}) {
            for (double x : *v) {
                EXPECT_EQ(x, 0.0);
            }
        }
    }
}

TEST(ComputeUpdateTest, OneStepMatchesFiniteDifferenceOfReturnWeightedLogProb) {
    Rng rng(5);
    const PolicyModel model = reference_config().model();
    const PolicyParams p = random_params(rng, model);
    const std::vector<Trajectory> batch = exact_batch(model, p, 1, 1, 6);
    ASSERT_EQ(batch[0].size(), 1u);
    const TrajectoryStep& step = batch[0].steps[0];
    const double g = 1.0;
    const ParamDelta d = compute_update(batch, model, p, 1.0, ReturnMode::Episode);
    constexpr double h = 1e-4;
    auto objective = [&](const PolicyParams& q) {
        return g * std::log(exact_action_probs(model, q, step.state).probs[step.action]);
    };
    for (std::size_t k = 0; k < p.phi.size(); ++k) {
        PolicyParams plus = p, minus = p;
        plus.phi[k] += h;
        minus.phi[k] -= h;
        ASSERT_LE(testing::relative_error(d.dphi[k], (objective(plus) - objective(minus)) / (2 * h)), 1e-4);
    }
    for (std::size_t k = 0; k < p.lambda.size(); ++k) {
        PolicyParams plus = p, minus = p;
        plus.lambda[k] += h;
        minus.lambda[k] -= h;
        ASSERT_LE(testing::relative_error(d.dlambda[k], (objective(plus) - objective(minus)) / (2 * h)), 1e-4);
    }
    for (std::size_t k = 0; k < 2; ++k) {
        PolicyParams plus = p, minus = p;
        plus.omega[k] += h;
        minus.omega[k] -= h;
        ASSERT_LE(testing::relative_error(d.domega[k], (objective(plus) - objective(minus)) / (2 * h)), 1e-4);
    }
}

TEST(ComputeUpdateTest, DuplicatedTrajectoriesAverageOut) {
    Rng rng(7);
    const PolicyModel model = reference_config().model();
    const PolicyParams p = random_params(rng, model);
    const std::vector<Trajectory> one = exact_batch(model, p, 1, 30, 8);
    const std::vector<Trajectory> many(5, one[0]);
    for (ReturnMode mode : {ReturnMode::Episode, ReturnMode::RewardToGo}) {
        const ParamDelta a = compute_update(one, model, p, 1.0, mode);
        const ParamDelta b = compute_update(many, model, p, 1.0, mode);
        EXPECT_LE(max_abs_diff(a.dphi, b.dphi), 1e-12);
        EXPECT_LE(max_abs_diff(a.dlambda, b.dlambda), 1e-12);
        EXPECT_LE(max_abs_diff(a.domega, b.domega), 1e-12);
    }
}

TEST(ComputeUpdateTest, RequiresTrajectories) {
    const PolicyModel model = reference_config().model();
    EXPECT_THROW(compute_update({}, model, init_params(model, 0), 1.0), std::invalid_argument);
}

TEST(ComputeUpdateProperty, NoiselessEqualsTextbookReinforce) {
    Rng rng(9);
    const PolicyModel model = reference_config().model();
    for (int trial = 0; trial < 20; ++trial) {
        const PolicyParams p = random_params(rng, model);
        const std::vector<Trajectory> batch = exact_batch(model, p, 3, 15, rng());
        const double gamma = trial % 2 ? 1.0 : 0.97;
        const ParamDelta got = compute_update(batch, model, p, gamma, ReturnMode::Episode);
        const ParamDelta want = testing::textbook_reinforce(batch, model, p, gamma);
        EXPECT_EQ(got.clamped_steps, 0u);
        ASSERT_LE(max_abs_diff(got.dphi, want.dphi), 1e-12);
        ASSERT_LE(max_abs_diff(got.dlambda, want.dlambda), 1e-12);
        ASSERT_LE(max_abs_diff(got.domega, want.domega), 1e-12);
    }
}

TEST(ComputeUpdateTest, RewardToGoWeighsEachStepByItsTail) {
    Rng rng(10);
    const PolicyModel model = reference_config().model();
    const PolicyParams p = random_params(rng, model);
    const std::vector<Trajectory> batch = exact_batch(model, p, 1, 6, 12);
    const double gamma = 0.9;
    std::vector<double> want(2, 0.0);
    const auto rewards = batch[0].rewards();
    for (std::size_t t = 0; t < batch[0].size(); ++t) {
        const TrajectoryStep& s = batch[0].steps[t];
        const double g_t = discounted_return(std::span(rewards).subspan(t), gamma);
        const PolicyGradient lg = log_prob_gradient(model, p, s.state, s.action, s.device_probs);
        want[0] += g_t * lg.domega[0];
        want[1] += g_t * lg.domega[1];
    }
    const ParamDelta d = compute_update(batch, model, p, gamma, ReturnMode::RewardToGo);
    EXPECT_LE(max_abs_diff(d.domega, want), 1e-12);
}

TEST(ComputeUpdateProperty, BanditOmegaGradientFavoursRewardedAction) {
    // One-step episodes from a fixed state; reward equals the action index.
    Rng rng(13);
    const PolicyModel model = reference_config().model();
    const std::vector<double> state = {0.02, -0.01, 0.03, 0.01};
    int toward_one = 0;
    for (int init = 0; init < 100; ++init) {
        const PolicyParams p = init_params(model, rng(), 1.0);
        const ActionDistribution pi = exact_action_probs(model, p, state);
        std::vector<Trajectory> batch;
        for (int i = 0; i < 200; ++i) {
            const std::size_t a = sample_action(pi, rng);
            batch.push_back({{{state, a, static_cast<double>(a), pi}}});
        }
        const ParamDelta d = compute_update(batch, model, p, 1.0, ReturnMode::Episode);
        const double e = expectation(simulate(bind_parameters(model.ir, p.phi, p.lambda, state)), model.observable);
        // d pi_1 / d omega_b = beta e pi_1 (delta_1b - pi_b)
        const double dpi1 = p.beta * e * pi.probs[1] * (-pi.probs[0] * d.domega[0] + (1 - pi.probs[1]) * d.domega[1]);
        toward_one += dpi1 > 0;
    }
    EXPECT_GE(toward_one, 95);
}

TEST(ApplyUpdateTest, ZeroDeltaLeavesParams) {
    Rng rng(1);
    const TrainConfig c = reference_config();
    const PolicyModel model = c.model();
    const PolicyParams p = random_params(rng, model);
    ParamDelta zero{std::vector<double>(p.phi.size(), 0.0), std::vector<double>(p.lambda.size(), 0.0),
                    std::vector<double>(2, 0.0), 0, {}};
    OptimizerState state;
    EXPECT_EQ(apply_update(p, zero, state, c), p);
    TrainConfig sgd = c;
    sgd.optimizer = OptimizerKind::Sgd;
    OptimizerState s2;
    EXPECT_EQ(apply_update(p, zero, s2, sgd), p);
}

TEST(ApplyUpdateTest, SgdStepIsExact) {
    Rng rng(2);
    TrainConfig c = reference_config();
    c.optimizer = OptimizerKind::Sgd;
    const PolicyModel model = c.model();
    const PolicyParams p = random_params(rng, model);
    const ParamDelta d{testing::random_vector(rng, p.phi.size(), -1, 1),
                       testing::random_vector(rng, p.lambda.size(), -1, 1), testing::random_vector(rng, 2, -1, 1), 0,
                       {}};
    OptimizerState state;
    const PolicyParams q = apply_update(p, d, state, c);
    for (std::size_t k = 0; k < p.phi.size(); ++k) {
        EXPECT_EQ(q.phi[k], p.phi[k] + 0.01 * d.dphi[k]);
    }
    for (std::size_t k = 0; k < p.lambda.size(); ++k) {
        EXPECT_EQ(q.lambda[k], p.lambda[k] + 0.1 * d.dlambda[k]);
    }
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_EQ(q.omega[k], p.omega[k] + 0.1 * d.domega[k]);
    }
}

TEST(ApplyUpdateTest, AdamStepApproachesLearningRate) {
    Rng rng(3);
    const TrainConfig c = reference_config();
    const PolicyModel model = c.model();
    PolicyParams p = random_params(rng, model);
    const ParamDelta d{testing::random_vector(rng, p.phi.size(), 0.5, 2),
                       testing::random_vector(rng, p.lambda.size(), -2, -0.5), {3.0, -0.01}, 0, {}};
    OptimizerState state;
    PolicyParams prev = p;
    for (int i = 0; i < 200; ++i) {
        prev = p;
        p = apply_update(p, d, state, c);
    }
    for (std::size_t k = 0; k < p.phi.size(); ++k) {
        EXPECT_NEAR(p.phi[k] - prev.phi[k], 0.01, 1e-6);
    }
    for (std::size_t k = 0; k < p.lambda.size(); ++k) {
        EXPECT_NEAR(p.lambda[k] - prev.lambda[k], -0.1, 1e-5);
    }
    EXPECT_NEAR(p.omega[1] - prev.omega[1], -0.1, 1e-4);
    EXPECT_EQ(state.phi.t, 200u);
}

TEST(ApplyUpdateTest, ShapeMismatchThrows) {
    const TrainConfig c = reference_config();
    const PolicyParams p = init_params(c.model(), 0);
    ParamDelta d{std::vector<double>(3, 0.0), std::vector<double>(p.lambda.size(), 0.0), {0.0, 0.0}, 0, {}};
    OptimizerState state;
    EXPECT_THROW(apply_update(p, d, state, c), std::invalid_argument);
}

TEST(TrainTest, ZeroBudgetReturnsInitialParams) {
    TrainConfig c = reference_config();
    c.episodes = 0;
    const TrainResult r = train(c);
    EXPECT_TRUE(r.metrics.empty());
    EXPECT_EQ(r.params, init_params(c.model(), derive_seed(c.seed, 0x1000)));
}

TEST(TrainTest, MetricsLengthAndReproducibility) {
    TrainConfig c = reference_config();
    c.episodes = 23;
    c.episode_cap = 60;
    c.seed = 4;
    std::vector<std::size_t> streamed;
    const TrainResult a = train(c, [&](const EpisodeMetrics& m) { streamed.push_back(m.episode); });
    ASSERT_EQ(a.metrics.size(), 23u);
    for (std::size_t i = 0; i < streamed.size(); ++i) {
        EXPECT_EQ(streamed[i], i);
    }
    const TrainResult b = train(c);
    EXPECT_EQ(a.params, b.params);
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        EXPECT_EQ(a.metrics[i].reward, b.metrics[i].reward);
        EXPECT_EQ(a.metrics[i].moving_avg5, b.metrics[i].moving_avg5);
    }
    std::vector<EpisodeMetrics> copy = a.metrics;
    fill_moving_average(copy);
    for (std::size_t i = 0; i < copy.size(); ++i) {
        EXPECT_NEAR(copy[i].moving_avg5, a.metrics[i].moving_avg5, 1e-12);
    }
}

TEST(TrainTest, ResumeFromParamsContinuesDeterministically) {
    TrainConfig c = reference_config();
    c.episodes = 10;
    c.episode_cap = 40;
    const TrainResult first = train(c);
    const TrainResult again = train(c, {}, first.params);
    const TrainResult again2 = train(c, {}, first.params);
    EXPECT_EQ(again.params, again2.params);
    EXPECT_NE(again.params, first.params);
}

TEST(TrainTest, RetriesTransientRemoteFailures) {
    MockJobServer server({.noise = {}, .token = "", .min_latency = {}, .max_latency = {}, .latency_seed = 0});
    server.start();
    TrainConfig c = reference_config();
    c.episodes = 2;
    c.n_trajectories = 2;
    c.episode_cap = 3;
    c.backend.kind = BackendKind::Remote;
    c.backend.endpoint = server.endpoint();
    c.backend.shots = 64;
    c.retries = 3;
    server.inject_failures(2);
    const TrainResult r = train(c);
    EXPECT_EQ(r.metrics.size(), 2u);

    c.retries = 1;
    server.inject_failures(5);
    EXPECT_THROW(train(c), BackendError);
    server.stop();
}

TEST(CheckpointTest, RoundTripAndErrors) {
    Rng rng(4);
    const TrainConfig c = reference_config();
    const Checkpoint ckpt{c.genome, 4, random_params(rng, c.model()), 17};
    const std::string path = (std::filesystem::temp_directory_path() / "quarl_ckpt_test.json").string();
    write_checkpoint(path, ckpt);
    const Checkpoint back = read_checkpoint(path);
    EXPECT_EQ(back.genome, ckpt.genome);
    EXPECT_EQ(back.n_qubits, 4u);
    EXPECT_EQ(back.params, ckpt.params);
    EXPECT_EQ(back.episode, 17u);

    std::ofstream(path) << "{\"genome\": \"1-0\"}";
    EXPECT_THROW(read_checkpoint(path), std::runtime_error);
    std::remove(path.c_str());
    EXPECT_THROW(read_checkpoint(path), std::runtime_error);
}

TEST(MetricsCsvTest, HeaderAndRows) {
    std::vector<EpisodeMetrics> m = {{0, 12, 12, 0, 1.4}, {1, 20, 16, 2, 3.6}};
    std::ostringstream out;
    write_metrics_csv(out, m);
    EXPECT_EQ(out.str(), "episode,reward,moving_avg5,clamped_steps,wallclock_ms\n0,12,12,0,1\n1,20,16,2,4\n");
}

}  // namespace
}  // namespace quarl
