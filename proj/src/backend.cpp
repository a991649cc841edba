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

#include "quarl/backend.hpp"

#include <cstdio>
#include <sstream>
#include <thread>

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace quarl {

using nlohmann::json;

const char* backend_name(BackendKind kind) {
    switch (kind) {
        case BackendKind::Exact:
            return "exact";
        case BackendKind::Emulated:
            return "emulated";
        case BackendKind::Remote:
            return "remote";
    }
    return "?";
}

BackendKind parse_backend_kind(std::string_view name) {
    if (name == "exact") return BackendKind::Exact;
    if (name == "emulated") return BackendKind::Emulated;
    if (name == "remote") return BackendKind::Remote;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected exact|emulated|remote)");
}

void BackendDescriptor::validate() const {
    if (kind != BackendKind::Exact && shots == 0) {
        throw std::invalid_argument("backend shots must be >= 1");
    }
    noise.validate();
    if (kind == BackendKind::Remote && endpoint.empty()) {
        throw std::invalid_argument("remote backend requires an endpoint");
    }
}

double ExactBackend::execute(const BoundCircuit& circuit, std::uint64_t /*seed*/) const {
    return expectation(simulate(circuit), observable());
}

EmulatedBackend::EmulatedBackend(PauliZString observable, std::uint64_t shots, NoiseModel noise,
                                 std::optional<CouplingMap> coupling)
    : Backend(observable), shots_(shots), noise_(noise), coupling_(std::move(coupling)) {
    if (shots_ == 0) {
        throw std::invalid_argument("EmulatedBackend: shots must be >= 1");
    }
    noise_.validate();
}

Counts EmulatedBackend::run_counts(const BoundCircuit& circuit, std::uint64_t seed) const {
    const CompiledCircuit compiled =
        lower(circuit, coupling_ ? *coupling_ : CouplingMap::linear(circuit.n_qubits));
    return sample_noisy_counts(compiled.n_qubits, compiled.gates, noise_, shots_, seed);
}

double EmulatedBackend::execute(const BoundCircuit& circuit, std::uint64_t seed) const {
    return estimate_expectation(run_counts(circuit, seed), observable());
}

const char* job_status_name(JobStatus status) {
    switch (status) {
        case JobStatus::Queued:
            return "queued";
        case JobStatus::Running:
            return "running";
        case JobStatus::Done:
            return "done";
        case JobStatus::Failed:
            return "failed";
    }
    return "?";
}

JobStatus parse_job_status(std::string_view name) {
    if (name == "queued") return JobStatus::Queued;
    if (name == "running") return JobStatus::Running;
    if (name == "done") return JobStatus::Done;
    if (name == "failed") return JobStatus::Failed;
    throw std::invalid_argument("unknown job status '" + std::string(name) + "'");
}

namespace {

struct Endpoint {
    std::string scheme_host_port;
    std::string base_path;
};

Endpoint split_endpoint(const std::string& url) {
    const std::size_t scheme = url.find("://");
    const std::size_t path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        return {url, ""};
    }
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') {
        path.pop_back();
    }
    return {url.substr(0, path_start), path};
}

httplib::Headers auth_headers(const BackendDescriptor& d) {
    httplib::Headers h;
    if (!d.token.empty()) {
        h.emplace("Authorization", "Bearer " + d.token);
    }
    return h;
}

Counts counts_from_json(const json& j, std::uint64_t shots_hint) {
    Counts c;
    for (const auto& [bits, count] : j.items()) {
        c.histogram.emplace(bits, count.get<std::uint64_t>());
        c.shots += count.get<std::uint64_t>();
    }
    if (c.shots == 0) {
        c.shots = shots_hint;
    }
    return c;
}

}  // namespace

RemoteClient::RemoteClient(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) {
    if (descriptor_.endpoint.empty()) {
        throw std::invalid_argument("RemoteClient: empty endpoint");
    }
}

std::string RemoteClient::submit(const CompiledCircuit& circuit, std::uint64_t shots, std::uint64_t seed) const {
    const Endpoint ep = split_endpoint(descriptor_.endpoint);
    httplib::Client cli(ep.scheme_host_port);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(descriptor_.timeout).count() + 1);
    const json body = {{"circuit", serialize_circuit(circuit)}, {"shots", shots}, {"seed", seed}};
    auto res = cli.Post(ep.base_path + "/jobs", auth_headers(descriptor_), body.dump(), "application/json");
    if (!res) {
        throw BackendError("submit failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200 && res->status != 201 && res->status != 202) {
        throw BackendError("submit rejected with HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    try {
        return json::parse(res->body).at("id").get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("submit returned malformed body: ") + e.what());
    }
}

Job RemoteClient::poll(const std::string& job_id) const {
    const Endpoint ep = split_endpoint(descriptor_.endpoint);
    httplib::Client cli(ep.scheme_host_port);
    auto res = cli.Get(ep.base_path + "/jobs/" + job_id, auth_headers(descriptor_));
    if (!res) {
        throw BackendError("poll failed: " + httplib::to_string(res.error()), job_id);
    }
    if (res->status == 404) {
        throw JobNotFoundError("job not found: " + job_id, job_id);
    }
    if (res->status != 200) {
        throw BackendError("poll rejected with HTTP " + std::to_string(res->status) + ": " + res->body, job_id);
    }
    Job job;
    job.id = job_id;
    try {
        const json j = json::parse(res->body);
        job.status = parse_job_status(j.at("status").get<std::string>());
        if (j.contains("message")) {
            job.message = j.at("message").get<std::string>();
        }
        if (j.contains("circuit")) {
            job.circuit_text = j.at("circuit").get<std::string>();
        }
        if (job.status == JobStatus::Done) {
            job.result = counts_from_json(j.at("counts"), j.value("shots", std::uint64_t{0}));
        }
    } catch (const std::exception& e) {
        throw BackendError(std::string("poll returned malformed body: ") + e.what(), job_id);
    }
    return job;
}

Counts RemoteClient::wait(const std::string& job_id) const {
    const auto deadline = std::chrono::steady_clock::now() + descriptor_.timeout;
    while (true) {
        Job job = poll(job_id);
        if (job.status == JobStatus::Done) {
            return std::move(*job.result);
        }
        if (job.status == JobStatus::Failed) {
            throw JobFailedError("job " + job_id + " failed: " + job.message, job_id);
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            throw RemoteTimeoutError("job " + job_id + " did not finish within " +
                                         std::to_string(descriptor_.timeout.count()) + " ms",
                                     job_id);
        }
        std::this_thread::sleep_for(descriptor_.poll_interval);
    }
}

RemoteBackend::RemoteBackend(PauliZString observable, BackendDescriptor descriptor)
    : Backend(observable), descriptor_(descriptor), client_(std::move(descriptor)) {}

double RemoteBackend::execute(const BoundCircuit& circuit, std::uint64_t seed) const {
    const CompiledCircuit compiled =
        lower(circuit, descriptor_.coupling ? *descriptor_.coupling : CouplingMap::linear(circuit.n_qubits));
    const std::string id = client_.submit(compiled, descriptor_.shots, seed);
    return estimate_expectation(client_.wait(id), observable());
}

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor, const PauliZString& observable) {
    descriptor.validate();
    switch (descriptor.kind) {
        case BackendKind::Exact:
            return std::make_unique<ExactBackend>(observable);
        case BackendKind::Emulated:
            return std::make_unique<EmulatedBackend>(observable, descriptor.shots, descriptor.noise,
                                                     descriptor.coupling);
        case BackendKind::Remote:
            return std::make_unique<RemoteBackend>(observable, descriptor);
    }
    throw std::invalid_argument("make_backend: unknown backend kind");
}

double execute(const BoundCircuit& circuit, const BackendDescriptor& descriptor, const PauliZString& observable,
               std::uint64_t seed) {
    return make_backend(descriptor, observable)->execute(circuit, seed);
}

Job poll(const std::string& job_id, const BackendDescriptor& descriptor) {
    return RemoteClient(descriptor).poll(job_id);
}

std::string serialize_circuit(const CompiledCircuit& compiled) {
    std::string out = "qubits " + std::to_string(compiled.n_qubits) + "\n";
    char angle[64];
    for (const Gate& g : compiled.gates) {
        const std::string q0 = "q[" + std::to_string(g.q0) + "]";
        switch (g.kind) {
            case GateKind::RX:
            case GateKind::RY:
            case GateKind::RZ:
                std::snprintf(angle, sizeof angle, "%.12g", g.angle);
                out += g.kind == GateKind::RX ? "rx " : g.kind == GateKind::RY ? "ry " : "rz ";
                out += q0 + " " + angle + "\n";
                break;
            case GateKind::H:
                out += "h " + q0 + "\n";
                break;
            case GateKind::CNOT:
                out += "cx " + q0 + ",q[" + std::to_string(g.q1) + "]\n";
                break;
            case GateKind::CZ:
                throw std::invalid_argument("serialize_circuit: CZ is not in the compiled basis");
        }
    }
    return out;
}

namespace {

std::uint32_t parse_qubit_ref(const std::string& token, std::size_t line_no) {
    unsigned q = 0;
    int consumed = -1;
    if (token.empty() || token[0] != 'q' || std::sscanf(token.c_str(), "q[%u]%n", &q, &consumed) != 1 ||
        consumed != static_cast<int>(token.size())) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad qubit reference '" + token + "'");
    }
    return q;
}

}  // namespace

CompiledCircuit parse_circuit(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    CompiledCircuit out;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string op;
        ls >> op;
        if (!have_header) {
            long long n = -1;
            if (op != "qubits" || !(ls >> n) || n < 0) {
                throw std::invalid_argument("circuit text must start with 'qubits <n>'");
            }
            out.n_qubits = static_cast<std::size_t>(n);
            have_header = true;
            continue;
        }
        std::string arg;
        ls >> arg;
        Gate g{};
        if (op == "rx" || op == "ry" || op == "rz") {
            g.kind = op == "rx" ? GateKind::RX : op == "ry" ? GateKind::RY : GateKind::RZ;
            g.q0 = parse_qubit_ref(arg, line_no);
            std::string angle;
            if (!(ls >> angle)) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": missing angle");
            }
            std::size_t used = 0;
            try {
                g.angle = std::stod(angle, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != angle.size()) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": bad angle '" + angle + "'");
            }
        } else if (op == "h") {
            g.kind = GateKind::H;
            g.q0 = parse_qubit_ref(arg, line_no);
        } else if (op == "cx") {
            g.kind = GateKind::CNOT;
            const std::size_t comma = arg.find(',');
            if (comma == std::string::npos) {
                throw std::invalid_argument("line " + std::to_string(line_no) + ": cx needs two qubits");
            }
            g.q0 = parse_qubit_ref(arg.substr(0, comma), line_no);
            g.q1 = parse_qubit_ref(arg.substr(comma + 1), line_no);
        } else {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown gate '" + op + "'");
        }
        std::string extra;
        if (ls >> extra) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": trailing tokens");
        }
        if (g.q0 >= out.n_qubits || (g.kind == GateKind::CNOT && (g.q1 >= out.n_qubits || g.q1 == g.q0))) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": qubit index out of range");
        }
        out.gates.push_back(g);
    }
    if (!have_header) {
        throw std::invalid_argument("circuit text must start with 'qubits <n>'");
    }
    return out;
}

}  // namespace quarl
