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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quarl/cartpole.hpp"
#include "quarl/cli.hpp"
#include "quarl/compiler.hpp"
#include "quarl/config.hpp"
#include "quarl/nsga2.hpp"
#include "quarl/policy.hpp"
#include "quarl/reinforce.hpp"
#include "quarl/statevector.hpp"

namespace py = pybind11;

namespace {

using namespace quarl;

PolicyModel model_for(const std::string& genome, std::size_t n_qubits) {
    return {decode_genome(parse_genome(genome), n_qubits), PauliZString::all(n_qubits), 2, EncodeSquash::None};
}

py::dict params_dict(const PolicyParams& p) {
    py::dict d;
    d["phi"] = p.phi;
    d["lambda"] = p.lambda;
    d["omega"] = p.omega;
    d["beta"] = p.beta;
    return d;
}

PolicyParams params_from(const py::dict& d) {
    PolicyParams p;
    p.phi = d["phi"].cast<std::vector<double>>();
    p.lambda = d["lambda"].cast<std::vector<double>>();
    p.omega = d["omega"].cast<std::vector<double>>();
    p.beta = d.contains("beta") ? d["beta"].cast<double>() : 1.0;
    return p;
}

py::list metrics_list(const std::vector<EpisodeMetrics>& metrics) {
    py::list out;
    for (const EpisodeMetrics& m : metrics) {
        py::dict row;
        row["episode"] = m.episode;
        row["reward"] = m.reward;
        row["moving_avg5"] = m.moving_avg5;
        row["clamped_steps"] = m.clamped_steps;
        out.append(row);
    }
    return out;
}

RunConfig run_config_from_json(const std::string& config_json) {
    RunConfig config;
    apply_json(config, nlohmann::json::parse(config_json));
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quarl: quantum policy-gradient agents on CartPole";
    m.attr("__version__") = kVersion;
    m.attr("REFERENCE_GENOME") = kReferenceGenome;
    m.attr("ALT5_GENOME") = kAlt5Genome;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);

    m.def("normalize_genome", [](const std::string& text) { return format_genome(parse_genome(text)); },
          py::arg("genome"));
    m.def(
        "parameter_counts",
        [](const std::string& genome, std::size_t n_qubits) {
            const CircuitIR ir = decode_genome(parse_genome(genome), n_qubits);
            return py::make_tuple(ir.n_phi, ir.n_lambda);
        },
        py::arg("genome"), py::arg("n_qubits") = 4, "Returns (n_phi, n_lambda).");
    m.def(
        "compile_stats",
        [](const std::string& genome, std::size_t n_qubits) {
            const CompileStats s = genome_stats(parse_genome(genome), n_qubits);
            py::dict d;
            d["total_gates"] = s.total_gates;
            d["cnot_count"] = s.cnot_count;
            d["depth"] = s.depth;
            return d;
        },
        py::arg("genome"), py::arg("n_qubits") = 4);
    m.def(
        "expectation",
        [](const std::string& genome, const std::vector<double>& phi, const std::vector<double>& lambda,
           const std::vector<double>& state) {
            const CircuitIR ir = decode_genome(parse_genome(genome), state.size());
            return expectation(simulate(bind_parameters(ir, phi, lambda, state)), PauliZString::all(state.size()));
        },
        py::arg("genome"), py::arg("phi"), py::arg("lam"), py::arg("state"),
        "Noiseless <Z...Z> of the bound circuit; the width is len(state).");
    m.def(
        "init_params",
        [](const std::string& genome, std::uint64_t seed, std::size_t n_qubits) {
            return params_dict(init_params(model_for(genome, n_qubits), seed));
        },
        py::arg("genome"), py::arg("seed") = 0, py::arg("n_qubits") = 4);
    m.def(
        "action_probs",
        [](const std::string& genome, const py::dict& params, const std::vector<double>& state) {
            return exact_action_probs(model_for(genome, state.size()), params_from(params), state).probs;
        },
        py::arg("genome"), py::arg("params"), py::arg("state"));
    m.def(
        "cartpole_step",
        [](const std::vector<double>& s, int action) {
            if (s.size() != 4) {
                throw std::invalid_argument("cartpole state has 4 components");
            }
            const cartpole::StepResult r = cartpole::step({s[0], s[1], s[2], s[3]}, action);
            const auto next = r.next.as_array();
            return py::make_tuple(std::vector<double>(next.begin(), next.end()), r.terminated);
        },
        py::arg("state"), py::arg("action"), "Returns (next_state, terminated).");
    m.def(
        "train",
        [](const std::string& config_json) {
            const TrainConfig tc = to_train_config(run_config_from_json(config_json));
            if (tc.genome.genes.empty()) {
                throw ConfigError("train requires a genome");
            }
            TrainResult r;
            {
                py::gil_scoped_release release;
                r = train(tc);
            }
            return py::make_tuple(params_dict(r.params), metrics_list(r.metrics));
        },
        py::arg("config_json"), "Trains from a JSON config using the CLI keys; returns (params, metrics).");
    m.def(
        "non_dominated_sort",
        [](const std::vector<std::array<double, 2>>& objectives) { return nsga2::non_dominated_sort(objectives); },
        py::arg("objectives"));
    m.def(
        "crowding_distance",
        [](const std::vector<std::array<double, 2>>& front) { return nsga2::crowding_distance(front); },
        py::arg("front"));
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv = {"quarl"};
            for (const std::string& a : args) {
                argv.push_back(a.c_str());
            }
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
