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

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "quarl/circuit.hpp"
#include "quarl/compiler.hpp"
#include "quarl/statevector.hpp"

namespace quarl {

enum class BackendKind { Exact, Emulated, Remote };

const char* backend_name(BackendKind kind);
/// Accepts "exact", "emulated", "remote". Throws std::invalid_argument.
BackendKind parse_backend_kind(std::string_view name);

constexpr std::uint64_t kDefaultShots = 1000;
constexpr const char* kTokenEnvVar = "QUARL_TOKEN";

struct BackendDescriptor {
    BackendKind kind = BackendKind::Exact;
    std::uint64_t shots = kDefaultShots;
    NoiseModel noise;
    /// Base URL of the job service, e.g. "http://127.0.0.1:8080".
    std::string endpoint;
    std::string token;
    /// Empty map means a linear chain over the circuit's qubits.
    std::optional<CouplingMap> coupling;
    std::chrono::milliseconds poll_interval{5};
    std::chrono::milliseconds timeout{30000};

    /// Throws std::invalid_argument for inconsistent settings.
    void validate() const;
};

/// Failure while running a circuit on a backend. Carries the job id when one exists.
class BackendError : public std::runtime_error {
  public:
    BackendError(const std::string& what, std::string job_id = {})
        : std::runtime_error(what), job_id_(std::move(job_id)) {}
    const std::string& job_id() const { return job_id_; }

  private:
    std::string job_id_;
};

class JobNotFoundError : public BackendError {
  public:
    using BackendError::BackendError;
};

class RemoteTimeoutError : public BackendError {
  public:
    using BackendError::BackendError;
};

class JobFailedError : public BackendError {
  public:
    using BackendError::BackendError;
};

/// Maps a bound circuit to an estimate of the run's observable.
class Backend {
  public:
    virtual ~Backend() = default;

    /// Stochastic backends draw all randomness from `seed`.
    virtual double execute(const BoundCircuit& circuit, std::uint64_t seed) const = 0;
    virtual BackendKind kind() const = 0;

    const PauliZString& observable() const { return observable_; }

  protected:
    explicit Backend(PauliZString observable) : observable_(observable) {}

  private:
    PauliZString observable_;
};

class ExactBackend final : public Backend {
  public:
    explicit ExactBackend(PauliZString observable) : Backend(observable) {}
    double execute(const BoundCircuit& circuit, std::uint64_t seed) const override;
    BackendKind kind() const override { return BackendKind::Exact; }
};

/// Shot-sampled noisy device stand-in. Circuits are lowered to the coupling map first.
class EmulatedBackend final : public Backend {
  public:
    EmulatedBackend(PauliZString observable, std::uint64_t shots, NoiseModel noise,
                    std::optional<CouplingMap> coupling = std::nullopt);
    double execute(const BoundCircuit& circuit, std::uint64_t seed) const override;
    BackendKind kind() const override { return BackendKind::Emulated; }

    Counts run_counts(const BoundCircuit& circuit, std::uint64_t seed) const;

  private:
    std::uint64_t shots_;
    NoiseModel noise_;
    std::optional<CouplingMap> coupling_;
};

enum class JobStatus { Queued, Running, Done, Failed };

const char* job_status_name(JobStatus status);
JobStatus parse_job_status(std::string_view name);

struct Job {
    std::string id;
    JobStatus status = JobStatus::Queued;
    std::string circuit_text;
    std::optional<Counts> result;  // present iff status == Done
    std::string message;
};

/// Client for the job-queue contract: POST /jobs, GET /jobs/{id}.
class RemoteClient {
  public:
    explicit RemoteClient(BackendDescriptor descriptor);

    std::string submit(const CompiledCircuit& circuit, std::uint64_t shots, std::uint64_t seed) const;
    Job poll(const std::string& job_id) const;
    /// Polls until done; throws RemoteTimeoutError or JobFailedError.
    Counts wait(const std::string& job_id) const;

  private:
    BackendDescriptor descriptor_;
};

class RemoteBackend final : public Backend {
  public:
    RemoteBackend(PauliZString observable, BackendDescriptor descriptor);
    double execute(const BoundCircuit& circuit, std::uint64_t seed) const override;
    BackendKind kind() const override { return BackendKind::Remote; }

  private:
    BackendDescriptor descriptor_;
    RemoteClient client_;
};

std::unique_ptr<Backend> make_backend(const BackendDescriptor& descriptor, const PauliZString& observable);

double execute(const BoundCircuit& circuit, const BackendDescriptor& descriptor, const PauliZString& observable,
               std::uint64_t seed);

Job poll(const std::string& job_id, const BackendDescriptor& descriptor);

/// Text wire format: "qubits <n>" then one gate per line.
std::string serialize_circuit(const CompiledCircuit& compiled);
/// Throws std::invalid_argument on malformed text.
CompiledCircuit parse_circuit(std::string_view text);

}  // namespace quarl
