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

#include "quarl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quarl/backend.hpp"
#include "quarl/cartpole.hpp"
#include "quarl/compiler.hpp"
#include "quarl/config.hpp"
#include "quarl/mock_server.hpp"
#include "quarl/nsga2.hpp"
#include "quarl/reinforce.hpp"
#include "quarl/statevector.hpp"

namespace quarl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Thrown for configuration mistakes that deserve exit code 2.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Invocation {
    std::string config_path;
    json overrides = json::object();
    std::vector<std::string> genomes;
    int port = 0;
    std::uint64_t max_latency_ms = 200;
};

template <typename T>
void add_override(CLI::App* app, Invocation& inv, const std::string& flag, const std::string& key,
                  const std::string& help) {
    app->add_option_function<T>(
        flag, [&inv, key](const T& value) { inv.overrides[key] = value; }, help);
}

void add_common_options(CLI::App* app, Invocation& inv) {
    app->add_option("--config", inv.config_path, "JSON config file; flags override its keys")->check(CLI::ExistingFile);
    add_override<std::uint64_t>(app, inv, "--seed", "seed", "Root RNG seed");
    add_override<std::string>(app, inv, "--out", "out", "Output directory");
    add_override<std::string>(app, inv, "--backend", "backend", "exact | emulated | remote");
    add_override<std::uint64_t>(app, inv, "--shots", "shots", "Shots per circuit on sampled backends");
    add_override<double>(app, inv, "--noise-p1", "noise_p1", "Single-qubit depolarizing probability");
    add_override<double>(app, inv, "--noise-p2", "noise_p2", "Two-qubit depolarizing probability");
    add_override<std::string>(app, inv, "--genome", "genome", "Genome text, e.g. 3-1-1-2-0");
    add_override<std::size_t>(app, inv, "--episodes", "episodes", "Episode budget");
    add_override<std::size_t>(app, inv, "--episode-cap", "episode_cap", "Maximum steps per episode");
    add_override<std::string>(app, inv, "--endpoint", "endpoint", "Remote job service base URL");
    add_override<std::size_t>(app, inv, "--n-qubits", "n_qubits", "Circuit width");
}

void add_training_options(CLI::App* app, Invocation& inv) {
    add_override<std::size_t>(app, inv, "--trajectories", "n_trajectories", "Trajectories per update");
    add_override<std::string>(app, inv, "--optimizer", "optimizer", "adam | sgd");
    add_override<std::string>(app, inv, "--return-mode", "return_mode", "reward_to_go | episode");
    add_override<std::string>(app, inv, "--encode-squash", "encode_squash", "none | arctan");
    add_override<double>(app, inv, "--beta", "beta", "Inverse temperature");
    add_override<double>(app, inv, "--stop-moving-average", "stop_moving_average",
                         "Stop once the 5-episode moving average reaches this value");
}

RunConfig resolve(const Invocation& inv) {
    RunConfig config;
    try {
        if (!inv.config_path.empty()) {
            apply_json(config, read_config_file(inv.config_path));
        }
        apply_json(config, inv.overrides);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return config;
}

std::string token_from_env() {
    const char* token = std::getenv(kTokenEnvVar);
    return token ? token : "";
}

fs::path prepare_out(const RunConfig& config) {
    const fs::path dir(config.out);
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << "\n";
}

void write_resolved(const fs::path& dir, const char* command, const RunConfig& config) {
    write_json(dir / (std::string(command) + ".resolved.json"), to_json(config));
}

template <typename F>
auto as_usage(F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

double mean_reward(const std::vector<EpisodeMetrics>& metrics) {
    double sum = 0.0;
    for (const EpisodeMetrics& m : metrics) {
        sum += m.reward;
    }
    return metrics.empty() ? 0.0 : sum / static_cast<double>(metrics.size());
}

int cmd_train(const Invocation& inv, std::ostream& out) {
    const RunConfig config = resolve(inv);
    if (!config.genome) {
        throw UsageError("train requires --genome or a config file with a genome");
    }
    const TrainConfig tc = as_usage([&] { return to_train_config(config, token_from_env()); });
    std::optional<PolicyParams> initial;
    if (!config.checkpoint.empty()) {
        const Checkpoint ckpt = read_checkpoint(config.checkpoint);
        if (format_genome(ckpt.genome) != format_genome(tc.genome)) {
            throw UsageError("checkpoint genome " + format_genome(ckpt.genome) + " differs from " +
                             format_genome(tc.genome));
        }
        initial = ckpt.params;
    }
    const fs::path dir = prepare_out(config);
    write_resolved(dir, "train", config);

    const TrainResult result = train(
        tc,
        [&](const EpisodeMetrics& m) {
            if ((m.episode + 1) % 10 == 0) {
                out << "episode " << m.episode + 1 << " reward " << m.reward << " avg5 " << m.moving_avg5 << "\n";
            }
        },
        initial);

    write_metrics_csv((dir / "metrics.csv").string(), result.metrics);
    write_checkpoint((dir / "checkpoint.json").string(),
                     {tc.genome, tc.n_qubits, result.params, result.metrics.size()});
    out << "trained " << result.metrics.size() << " episodes, mean reward " << mean_reward(result.metrics)
        << ", final avg5 " << (result.metrics.empty() ? 0.0 : result.metrics.back().moving_avg5) << "\n";
    return kExitOk;
}

int cmd_infer(const Invocation& inv, std::ostream& out) {
    RunConfig config = resolve(inv);
    if (config.checkpoint.empty()) {
        throw UsageError("infer requires --checkpoint");
    }
    const Checkpoint ckpt = read_checkpoint(config.checkpoint);
    config.genome = format_genome(ckpt.genome);
    config.n_qubits = ckpt.n_qubits;
    const TrainConfig tc = as_usage([&] { return to_train_config(config, token_from_env()); });
    const PolicyModel model = tc.model();
    const auto backend = make_backend(tc.backend, model.observable);

    const fs::path dir = prepare_out(config);
    write_resolved(dir, "infer", config);
    const std::vector<EpisodeMetrics> metrics =
        run_policy(model, ckpt.params, *backend, tc.episodes, tc.episode_cap, tc.seed);
    write_metrics_csv((dir / "infer_metrics.csv").string(), metrics);
    out << "inferred " << metrics.size() << " episodes, mean reward " << mean_reward(metrics) << "\n";
    return kExitOk;
}

json individual_json(const nsga2::Individual& ind) {
    return {{"genome", format_genome(ind.genome)},
            {"mean_reward", -ind.objectives[0]},
            {"ent_count", static_cast<std::size_t>(ind.objectives[1])},
            {"rank", ind.rank},
            {"crowding", std::isinf(ind.crowding) ? json("inf") : json(ind.crowding)}};
}

int cmd_search(const Invocation& inv, std::ostream& out) {
    const RunConfig config = resolve(inv);
    const nsga2::SearchConfig sc = as_usage([&] { return to_search_config(config); });
    const fs::path dir = prepare_out(config);
    write_resolved(dir, "search", config);

    const nsga2::SearchResult result = nsga2::evolve(sc);

    std::ofstream csv(dir / "pareto.csv");
    if (!csv) {
        throw std::runtime_error("cannot write " + (dir / "pareto.csv").string());
    }
    csv << "genome,mean_reward,ent_count\n" << std::setprecision(10);
    for (const nsga2::Individual& ind : result.archive) {
        csv << format_genome(ind.genome) << "," << -ind.objectives[0] << ","
            << static_cast<std::size_t>(ind.objectives[1]) << "\n";
    }
    const fs::path gen_dir = dir / "generations";
    fs::create_directories(gen_dir);
    for (std::size_t g = 0; g < result.snapshots.size(); ++g) {
        json pop = json::array();
        for (const nsga2::Individual& ind : result.snapshots[g]) {
            pop.push_back(individual_json(ind));
        }
        char name[32];
        std::snprintf(name, sizeof(name), "gen_%03zu.json", g);
        write_json(gen_dir / name, {{"generation", g}, {"population", pop}});
    }
    out << "evaluated " << result.evaluated.size() << " genomes; pareto front:\n";
    for (const nsga2::Individual& ind : result.archive) {
        out << "  " << format_genome(ind.genome) << "  reward " << -ind.objectives[0] << "  ent "
            << ind.objectives[1] << "\n";
    }
    return kExitOk;
}

int cmd_compile_stats(const Invocation& inv, std::ostream& out) {
    const RunConfig config = resolve(inv);
    std::vector<std::pair<std::string, Genome>> rows;
    std::vector<std::string> texts = inv.genomes;
    if (texts.empty() && config.genome) {
        texts.push_back(*config.genome);
    }
    for (const std::string& text : texts) {
        rows.emplace_back(text, as_usage([&] { return parse_genome(text); }));
    }
    rows.emplace_back("alt5", parse_genome(kAlt5Genome));
    rows.emplace_back("eqas", parse_genome(kEqasGenome));

    const fs::path dir = prepare_out(config);
    write_resolved(dir, "compile_stats", config);
    std::ofstream csv(dir / "compile_stats.csv");
    if (!csv) {
        throw std::runtime_error("cannot write " + (dir / "compile_stats.csv").string());
    }
    csv << "name,genome,total_gates,cnot_count,depth\n";
    out << std::left << std::setw(36) << "genome" << std::right << std::setw(8) << "gates" << std::setw(8)
        << "cnots" << std::setw(8) << "depth" << "\n";
    for (const auto& [name, genome] : rows) {
        const CompileStats s = as_usage([&] { return genome_stats(genome, config.n_qubits); });
        const std::string text = format_genome(genome);
        csv << name << "," << text << "," << s.total_gates << "," << s.cnot_count << "," << s.depth << "\n";
        const std::string label = name == text ? text : name + " (" + text + ")";
        out << std::left << std::setw(36) << label << std::right << std::setw(8) << s.total_gates << std::setw(8)
            << s.cnot_count << std::setw(8) << s.depth << "\n";
    }
    return kExitOk;
}

int cmd_env_check(const Invocation& inv, std::ostream& out) {
    const RunConfig config = resolve(inv);
    bool ok = true;
    auto report = [&](const std::string& name, bool passed, const std::string& detail) {
        out << (passed ? "ok   " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << "\n";
        ok = ok && passed;
    };
    out << "quarl " << kVersion << "\n";

    BoundCircuit bell{2, {{GateKind::H, 0, 0, 0.0}, {GateKind::CNOT, 0, 1, 0.0}}};
    const double zz = expectation(simulate(bell), PauliZString{0, 1});
    report("simulator", std::abs(zz - 1.0) < 1e-12, "<Z0 Z1> of a Bell pair = " + std::to_string(zz));

    const cartpole::StepResult r = cartpole::step({}, 1);
    report("cartpole", std::abs(r.next.x_dot - 0.195122) < 1e-6 && std::abs(r.next.theta_dot + 0.292683) < 1e-6,
           "");

    try {
        const BackendDescriptor d = as_usage([&] { return to_backend_descriptor(config, token_from_env()); });
        const auto backend = make_backend(d, PauliZString::all(config.n_qubits));
        const double e = backend->execute(BoundCircuit{config.n_qubits, {}}, config.seed);
        report(std::string("backend ") + backend_name(d.kind), e > 0.9, "<Z...Z> of |0...0> = " + std::to_string(e));
    } catch (const BackendError& e) {
        report(std::string("backend ") + config.backend, false, e.what());
    }
    return ok ? kExitOk : kExitFailure;
}

int cmd_serve_mock(const Invocation& inv, std::ostream& out) {
    const RunConfig config = resolve(inv);
    MockServerOptions options;
    options.noise = {config.noise_p1, config.noise_p2};
    options.noise.validate();
    options.token = token_from_env();
    options.max_latency = std::chrono::milliseconds(inv.max_latency_ms);
    MockJobServer server(options);
    server.start(inv.port);
    out << "listening on " << server.endpoint() << std::endl;
    server.join();
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app("Quantum policy-gradient training, inference and architecture search", "quarl");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Invocation inv;

    CLI::App* train_cmd = app.add_subcommand("train", "Train a policy and write metrics and a checkpoint");
    add_common_options(train_cmd, inv);
    add_training_options(train_cmd, inv);
    add_override<std::string>(train_cmd, inv, "--checkpoint", "checkpoint", "Resume from this checkpoint");

    CLI::App* infer_cmd = app.add_subcommand("infer", "Run a frozen checkpoint and write metrics");
    add_common_options(infer_cmd, inv);
    add_training_options(infer_cmd, inv);
    add_override<std::string>(infer_cmd, inv, "--checkpoint", "checkpoint", "Checkpoint JSON to evaluate");

    CLI::App* search_cmd = app.add_subcommand("search", "Two-objective architecture search");
    add_common_options(search_cmd, inv);
    add_training_options(search_cmd, inv);
    add_override<std::size_t>(search_cmd, inv, "--population", "population", "Population size (even)");
    add_override<std::size_t>(search_cmd, inv, "--generations", "generations", "Generations");
    add_override<std::size_t>(search_cmd, inv, "--eval-episodes", "eval_episodes", "Training episodes per evaluation");
    add_override<std::size_t>(search_cmd, inv, "--eval-seeds", "eval_seeds", "Evaluation seeds per genome");
    add_override<std::size_t>(search_cmd, inv, "--workers", "workers", "Parallel evaluations");

    CLI::App* stats_cmd = app.add_subcommand("compile-stats", "Compiled gate, CNOT and depth counts");
    add_common_options(stats_cmd, inv);
    stats_cmd->add_option("genomes", inv.genomes, "Genomes to compile; baselines alt5 and eqas are appended");

    CLI::App* check_cmd = app.add_subcommand("env-check", "Self-test the simulator, environment and backend");
    add_common_options(check_cmd, inv);

    CLI::App* mock_cmd = app.add_subcommand("serve-mock", "Serve the loopback remote job API");
    add_common_options(mock_cmd, inv);
    mock_cmd->add_option("--port", inv.port, "Port to bind; 0 picks one");
    mock_cmd->add_option("--max-latency-ms", inv.max_latency_ms, "Upper bound of the simulated job latency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        if (chosen == train_cmd) {
            return cmd_train(inv, out);
        }
        if (chosen == infer_cmd) {
            return cmd_infer(inv, out);
        }
        if (chosen == search_cmd) {
            return cmd_search(inv, out);
        }
        if (chosen == stats_cmd) {
            return cmd_compile_stats(inv, out);
        }
        if (chosen == check_cmd) {
            return cmd_env_check(inv, out);
        }
        return cmd_serve_mock(inv, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << chosen->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace quarl
