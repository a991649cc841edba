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

// Runs the nine acceptance criteria and prints one PASS/FAIL line for each.
// Pass criterion numbers as arguments to run a subset, e.g. `acceptance_test 4 5`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "quarl/cartpole.hpp"
#include "quarl/cli.hpp"
#include "quarl/compiler.hpp"
#include "quarl/nsga2.hpp"
#include "quarl/policy.hpp"
#include "quarl/reinforce.hpp"
#include "quarl/statevector.hpp"
#include "reference_reinforce.hpp"
#include "test_util.hpp"

namespace quarl {
namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

double mean_reward(const std::vector<EpisodeMetrics>& metrics) {
    double sum = 0.0;
    for (const EpisodeMetrics& m : metrics) {
        sum += m.reward;
    }
    return metrics.empty() ? 0.0 : sum / static_cast<double>(metrics.size());
}

double max_reward(const std::vector<EpisodeMetrics>& metrics) {
    double best = 0.0;
    for (const EpisodeMetrics& m : metrics) {
        best = std::max(best, m.reward);
    }
    return best;
}

TrainConfig reference_train_config(std::uint64_t seed) {
    TrainConfig c;
    c.genome = parse_genome(kReferenceGenome);
    c.seed = seed;
    return c;
}

Outcome noiseless_training() {
    int solved = 0;
    std::ostringstream detail;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TrainConfig c = reference_train_config(seed);
        c.episodes = 500;
        c.episode_cap = 500;
        c.stop_moving_average = 195.0;
        const TrainResult r = train(c);
        double best_avg = 0.0;
        for (const EpisodeMetrics& m : r.metrics) {
            best_avg = std::max(best_avg, m.moving_avg5);
        }
        const bool ok = best_avg >= 195.0;
        solved += ok;
        detail << " s" << seed << "=" << (ok ? std::to_string(r.metrics.size()) + "ep" : "no");
        std::printf("  seed %llu: best moving average %.1f after %zu episodes\n",
                    static_cast<unsigned long long>(seed), best_avg, r.metrics.size());
        std::fflush(stdout);
    }
    return {solved >= 7, std::to_string(solved) + "/10 seeds reach 195 (need 7);" + detail.str()};
}

struct NoisyRun {
    std::uint64_t seed;
    TrainResult result;
};

TrainConfig noisy_train_config(std::uint64_t seed) {
    TrainConfig c = reference_train_config(seed);
    c.backend.kind = BackendKind::Emulated;
    c.backend.shots = 1000;
    c.backend.noise = {0.001, 0.01};
    c.episodes = 100;
    c.episode_cap = 100;
    return c;
}

const std::vector<NoisyRun>& noisy_runs() {
    static const std::vector<NoisyRun> runs = [] {
        std::vector<NoisyRun> out;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            out.push_back({seed, train(noisy_train_config(seed))});
            const auto& m = out.back().result.metrics;
            std::printf("  seed %llu: mean %.2f max %.0f\n", static_cast<unsigned long long>(seed), mean_reward(m),
                        max_reward(m));
            std::fflush(stdout);
        }
        return out;
    }();
    return runs;
}

Outcome noisy_training() {
    int ok = 0;
    std::ostringstream detail;
    for (const NoisyRun& run : noisy_runs()) {
        const double mean = mean_reward(run.result.metrics), best = max_reward(run.result.metrics);
        const bool pass = mean > 25.0 && best >= 60.0;
        ok += pass;
        detail << fmt(" s%.0f mean=%.1f max=%.0f", static_cast<double>(run.seed), mean, best);
    }
    return {ok >= 3, std::to_string(ok) + "/5 seeds with mean > 25 and max >= 60 (need 3);" + detail.str()};
}

Outcome trained_inference() {
    const std::vector<NoisyRun>& runs = noisy_runs();
    const NoisyRun* best = &runs.front();
    for (const NoisyRun& run : runs) {
        if (mean_reward(run.result.metrics) > mean_reward(best->result.metrics)) {
            best = &run;
        }
    }
    const TrainConfig c = noisy_train_config(best->seed);
    const PolicyModel model = c.model();
    const auto backend = make_backend(c.backend, model.observable);
    PolicyParams uniform = best->result.params;
    uniform.beta = 0.0;
    constexpr std::uint64_t kEvalSeed = 0xE7A1;
    const double trained = mean_reward(run_policy(model, best->result.params, *backend, 100, c.episode_cap, kEvalSeed));
    const double random = mean_reward(run_policy(model, uniform, *backend, 100, c.episode_cap, kEvalSeed));
    return {trained - random >= 10.0,
            fmt("seed %.0f checkpoint mean %.2f vs uniform %.2f", static_cast<double>(best->seed), trained, random) +
                fmt(" (margin %.2f, need 10)", trained - random)};
}

Outcome compile_ordering() {
    const CompileStats best = genome_stats(parse_genome(kReferenceGenome), 4);
    const CompileStats alt5 = genome_stats(parse_genome(kAlt5Genome), 4);
    const bool pass = best.total_gates < alt5.total_gates && best.cnot_count < alt5.cnot_count && best.depth < alt5.depth;
    return {pass, "best " + std::to_string(best.total_gates) + "/" + std::to_string(best.cnot_count) + "/" +
                      std::to_string(best.depth) + " vs alt5 " + std::to_string(alt5.total_gates) + "/" +
                      std::to_string(alt5.cnot_count) + "/" + std::to_string(alt5.depth) + " (gates/cnots/depth)"};
}

Outcome gradient_check() {
    Rng rng(0x6AD);
    constexpr double h = 1e-4;
    double worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        Genome g;
        do {
            g = testing::random_genome(rng, kDefaultGenomeLength);
        } while (!nsga2::is_trainable(g));
        const PolicyModel model{decode_genome(g, 4), PauliZString::all(4), 2, EncodeSquash::None};
        const PolicyParams p{testing::random_angles(rng, model.ir.n_phi),
                             testing::random_vector(rng, model.ir.n_lambda, -1.5, 1.5),
                             testing::random_vector(rng, 2, -2, 2), uniform(rng, 0.5, 2.0)};
        const std::vector<double> state = testing::random_vector(rng, 4, -2, 2);
        const std::size_t action = uniform_index(rng, 2);
        const ActionDistribution pi = exact_action_probs(model, p, state);
        const PolicyGradient grad = log_prob_gradient(model, p, state, action, pi);
        auto log_pi = [&](const PolicyParams& q) { return std::log(exact_action_probs(model, q, state).probs[action]); };
        auto check = [&](const std::vector<double>& analytic, std::vector<double> PolicyParams::*member) {
            for (std::size_t k = 0; k < analytic.size(); ++k) {
                PolicyParams plus = p, minus = p;
                (plus.*member)[k] += h;
                (minus.*member)[k] -= h;
                const double fd = (log_pi(plus) - log_pi(minus)) / (2 * h);
                worst = std::max(worst, testing::relative_error(analytic[k], fd));
            }
        };
        check(grad.dphi, &PolicyParams::phi);
        check(grad.dlambda, &PolicyParams::lambda);
        check(grad.domega, &PolicyParams::omega);
    }
    return {worst <= 1e-4, fmt("worst relative error %.3g over 50 instances (limit 1e-4)", worst)};
}

Outcome cartpole_oracle() {
    const cartpole::StepResult r = cartpole::step({0, 0, 0, 0}, 1);
    const double step_err = std::max({std::abs(r.next.x), std::abs(r.next.x_dot - 0.195122), std::abs(r.next.theta),
                                      std::abs(r.next.theta_dot + 0.292683)});
    Rng rng(0xCA27);
    double mirror_err = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const cartpole::CartState s{uniform(rng, -2.4, 2.4), uniform(rng, -3, 3), uniform(rng, -0.21, 0.21),
                                    uniform(rng, -3, 3)};
        const int a = static_cast<int>(uniform_index(rng, 2));
        const cartpole::CartState m = cartpole::step({-s.x, -s.x_dot, -s.theta, -s.theta_dot}, 1 - a).next;
        const cartpole::CartState n = cartpole::step(s, a).next;
        mirror_err = std::max({mirror_err, std::abs(m.x + n.x), std::abs(m.x_dot + n.x_dot),
                               std::abs(m.theta + n.theta), std::abs(m.theta_dot + n.theta_dot)});
    }
    return {step_err <= 1e-6 && mirror_err <= 1e-12,
            fmt("step error %.2g (limit 1e-6), mirror error %.2g on 1e4 states (limit 1e-12)", step_err, mirror_err)};
}

std::vector<std::set<std::size_t>> brute_force_fronts(const std::vector<nsga2::Objectives>& objs) {
    std::vector<std::set<std::size_t>> fronts;
    std::set<std::size_t> remaining;
    for (std::size_t i = 0; i < objs.size(); ++i) {
        remaining.insert(i);
    }
    while (!remaining.empty()) {
        std::set<std::size_t> front;
        for (std::size_t p : remaining) {
            const bool dominated = std::any_of(remaining.begin(), remaining.end(), [&](std::size_t q) {
                return objs[q][0] <= objs[p][0] && objs[q][1] <= objs[p][1] &&
                       (objs[q][0] < objs[p][0] || objs[q][1] < objs[p][1]);
            });
            if (!dominated) {
                front.insert(p);
            }
        }
        for (std::size_t p : front) {
            remaining.erase(p);
        }
        fronts.push_back(front);
    }
    return fronts;
}

Outcome nsga2_correctness() {
    Rng rng(0x45A);
    int sort_mismatch = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 32);
        std::vector<nsga2::Objectives> objs(n);
        for (nsga2::Objectives& o : objs) {
            o = trial % 2 ? nsga2::Objectives{uniform(rng, 0, 1), uniform(rng, 0, 1)}
                          : nsga2::Objectives{static_cast<double>(uniform_index(rng, 6)),
                                              static_cast<double>(uniform_index(rng, 6))};
        }
        const auto fronts = nsga2::non_dominated_sort(objs);
        const auto want = brute_force_fronts(objs);
        bool same = fronts.size() == want.size();
        for (std::size_t f = 0; same && f < fronts.size(); ++f) {
            same = std::set<std::size_t>(fronts[f].begin(), fronts[f].end()) == want[f];
        }
        sort_mismatch += !same;
    }
    // Synthetic objectives: maximise Var genes, minimise Ent genes.
    auto synthetic = [](const Genome& g, std::uint64_t) {
        double var = 0, ent = 0;
        for (Gene x : g.genes) {
            if (x == Gene::Measure) {
                break;
            }
            var += x == Gene::Var;
            ent += x == Gene::Ent;
        }
        return nsga2::Objectives{-var, ent};
    };
    int dominated_archives = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        nsga2::SearchConfig c;
        c.population = 8;
        c.generations = 5;
        c.seed = seed;
        const nsga2::SearchResult r = nsga2::evolve(c, synthetic);
        bool dominated = r.archive.empty();
        for (const nsga2::Individual& a : r.archive) {
            for (const nsga2::Individual& e : r.evaluated) {
                dominated = dominated || nsga2::dominates(e.objectives, a.objectives);
            }
        }
        dominated_archives += dominated;
    }
    return {sort_mismatch == 0 && dominated_archives == 0,
            std::to_string(sort_mismatch) + "/500 sort mismatches, " + std::to_string(dominated_archives) +
                "/10 searches with a dominated archive member"};
}

Outcome estimator_consistency() {
    Rng rng(0xE57);
    std::ostringstream detail;
    bool pass = true;
    for (std::uint64_t shots : {100ull, 1000ull, 10000ull}) {
        int within = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 4);
            const BoundCircuit c = testing::random_circuit(rng, n, 15);
            std::vector<std::uint32_t> qubits;
            while (qubits.empty()) {
                for (std::uint32_t q = 0; q < n; ++q) {
                    if (uniform01(rng) < 0.5) {
                        qubits.push_back(q);
                    }
                }
            }
            const PauliZString obs(qubits);
            const StateVector psi = simulate(c);
            const double exact = expectation(psi, obs);
            const double est = estimate_expectation(sample_counts(psi, shots, rng()), obs);
            within += std::abs(est - exact) <= 3.0 / std::sqrt(static_cast<double>(shots));
        }
        pass = pass && within >= 990;
        detail << " " << shots << " shots: " << within << "/1000";
    }
    return {pass, "trials within 3/sqrt(shots) (need 990):" + detail.str()};
}

Outcome reinforce_degeneracy() {
    Rng rng(0xDE6);
    const PolicyModel model = reference_train_config(0).model();
    const ExactBackend backend(model.observable);
    double worst = 0.0;
    for (int batch_index = 0; batch_index < 20; ++batch_index) {
        const PolicyParams p{testing::random_angles(rng, model.ir.n_phi),
                             testing::random_vector(rng, model.ir.n_lambda, -1.5, 1.5),
                             testing::random_vector(rng, 2, -2, 2), 1.0};
        std::vector<Trajectory> batch;
        const std::uint64_t seed = rng();
        for (std::size_t i = 0; i < 3; ++i) {
            cartpole::Environment env(15);
            env.reset(derive_seed(seed, 2 * i));
            batch.push_back(collect_trajectory(model, p, env, backend, 15, derive_seed(seed, 2 * i + 1)));
        }
        const double gamma = batch_index % 2 ? 1.0 : 0.97;
        const ParamDelta got = compute_update(batch, model, p, gamma, ReturnMode::Episode);
        const ParamDelta want = testing::textbook_reinforce(batch, model, p, gamma);
        for (const auto& [a, b] : {std::pair{&got.dphi, &want.dphi}, std::pair{&got.dlambda, &want.dlambda},
                                   std::pair{&got.domega, &want.domega}}) {
            for (std::size_t k = 0; k < a->size(); ++k) {
                worst = std::max(worst, std::abs((*a)[k] - (*b)[k]));
            }
        }
    }
    return {worst <= 1e-12, fmt("max |update - textbook| = %.3g over 20 batches (limit 1e-12)", worst)};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace
}  // namespace quarl

int main(int argc, char** argv) {
    using namespace quarl;
    const std::vector<Criterion> criteria = {
        {1, "noiseless training reaches the goal", noiseless_training},
        {2, "noisy training beats random play", noisy_training},
        {3, "trained checkpoint beats the uniform policy", trained_inference},
        {4, "compiled cost below the alternating baseline", compile_ordering},
        {5, "policy gradient matches finite differences", gradient_check},
        {6, "cartpole dynamics oracle and mirror symmetry", cartpole_oracle},
        {7, "non-dominated sorting and elitist archive", nsga2_correctness},
        {8, "shot estimator within 3/sqrt(shots)", estimator_consistency},
        {9, "exact-backend update equals textbook REINFORCE", reinforce_degeneracy},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::atoi(argv[i]));
    }
    int failed = 0, ran = 0;
    std::vector<std::string> lines;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) {
            continue;
        }
        std::printf("criterion %d: %s ...\n", c.id, c.name);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char line[1024];
        std::snprintf(line, sizeof line, "%s criterion %d (%s): %s [%.1fs]", o.pass ? "PASS" : "FAIL", c.id, c.name,
                      o.detail.c_str(), secs);
        std::printf("%s\n", line);
        std::fflush(stdout);
        lines.push_back(line);
        failed += !o.pass;
        ++ran;
    }
    std::printf("\nsummary\n");
    for (const std::string& l : lines) {
        std::printf("%s\n", l.c_str());
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
