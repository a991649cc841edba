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

#include "quarl/mock_server.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "quarl/backend.hpp"
#include "quarl/random.hpp"

namespace quarl {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct JobRecord {
    std::string circuit;
    Clock::time_point submitted;
    Clock::duration latency;
    bool fail = false;
    std::string message;
    Counts counts;
};

}  // namespace

struct MockJobServer::State {
    MockServerOptions options;
    httplib::Server server;
    std::thread worker;
    int port = -1;

    mutable std::mutex mu;
    std::map<std::string, JobRecord> jobs;
    std::uint64_t next_id = 0;
    int pending_failures = 0;
    Rng latency_rng;
};

MockJobServer::MockJobServer(MockServerOptions options) : state_(std::make_unique<State>()) {
    options.noise.validate();
    if (options.max_latency < options.min_latency) {
        throw std::invalid_argument("MockJobServer: max_latency < min_latency");
    }
    state_->options = std::move(options);
    state_->latency_rng.seed(state_->options.latency_seed);

    State* st = state_.get();
    auto authorized = [st](const httplib::Request& req, httplib::Response& res) {
        if (st->options.token.empty()) {
            return true;
        }
        if (req.get_header_value("Authorization") != "Bearer " + st->options.token) {
            res.status = 401;
            res.set_content(R"({"error":"unauthorized"})", "application/json");
            return false;
        }
        return true;
    };

    st->server.Post("/jobs", [st, authorized](const httplib::Request& req, httplib::Response& res) {
        if (!authorized(req, res)) {
            return;
        }
        JobRecord rec;
        std::uint64_t shots = 0;
        std::uint64_t seed = 0;
        try {
            const json body = json::parse(req.body);
            rec.circuit = body.at("circuit").get<std::string>();
            shots = body.at("shots").get<std::uint64_t>();
            seed = body.value("seed", std::uint64_t{0});
            if (shots == 0) {
                throw std::invalid_argument("shots must be >= 1");
            }
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            return;
        }

        std::lock_guard lock(st->mu);
        rec.submitted = Clock::now();
        const auto span = (st->options.max_latency - st->options.min_latency).count();
        rec.latency = st->options.min_latency +
                      std::chrono::milliseconds(span == 0 ? 0 : uniform_index(st->latency_rng, span + 1));
        if (st->pending_failures > 0) {
            --st->pending_failures;
            rec.fail = true;
            rec.message = "injected failure";
        } else {
            try {
                const CompiledCircuit c = parse_circuit(rec.circuit);
                rec.counts = sample_noisy_counts(c.n_qubits, c.gates, st->options.noise, shots, seed);
            } catch (const std::exception& e) {
                rec.fail = true;
                rec.message = e.what();
            }
        }
        const std::string id = "job-" + std::to_string(st->next_id++);
        st->jobs.emplace(id, std::move(rec));
        res.status = 201;
        res.set_content(json{{"id", id}}.dump(), "application/json");
    });

    st->server.Get(R"(/jobs/([A-Za-z0-9_\-]+))", [st, authorized](const httplib::Request& req,
                                                                   httplib::Response& res) {
        if (!authorized(req, res)) {
            return;
        }
        const std::string id = req.matches[1];
        std::lock_guard lock(st->mu);
        auto it = st->jobs.find(id);
        if (it == st->jobs.end()) {
            res.status = 404;
            res.set_content(json{{"error", "unknown job " + id}}.dump(), "application/json");
            return;
        }
        const JobRecord& rec = it->second;
        const auto elapsed = Clock::now() - rec.submitted;
        json out = {{"id", id}};
        if (elapsed < rec.latency / 2) {
            out["status"] = "queued";
        } else if (elapsed < rec.latency) {
            out["status"] = "running";
        } else if (rec.fail) {
            out["status"] = "failed";
            out["message"] = rec.message;
        } else {
            out["status"] = "done";
            out["shots"] = rec.counts.shots;
            json counts = json::object();
            for (const auto& [bits, n] : rec.counts.histogram) {
                counts[bits] = n;
            }
            out["counts"] = std::move(counts);
        }
        res.set_content(out.dump(), "application/json");
    });
}

MockJobServer::~MockJobServer() {
    stop();
}

void MockJobServer::start(int port) {
    if (state_->worker.joinable()) {
        throw std::logic_error("MockJobServer already running");
    }
    if (port == 0) {
        state_->port = state_->server.bind_to_any_port("127.0.0.1");
    } else {
        state_->port = state_->server.bind_to_port("127.0.0.1", port) ? port : -1;
    }
    if (state_->port <= 0) {
        throw std::runtime_error("MockJobServer: could not bind a loopback port");
    }
    state_->worker = std::thread([st = state_.get()] { st->server.listen_after_bind(); });
    state_->server.wait_until_ready();
}

void MockJobServer::join() {
    if (state_->worker.joinable()) {
        state_->worker.join();
    }
}

void MockJobServer::stop() {
    if (!state_) {
        return;
    }
    state_->server.stop();
    if (state_->worker.joinable()) {
        state_->worker.join();
    }
}

int MockJobServer::port() const {
    return state_->port;
}

std::string MockJobServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(state_->port);
}

void MockJobServer::inject_failures(int n) {
    std::lock_guard lock(state_->mu);
    state_->pending_failures += n;
}

std::size_t MockJobServer::jobs_submitted() const {
    std::lock_guard lock(state_->mu);
    return state_->jobs.size();
}

}  // namespace quarl
