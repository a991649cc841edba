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
#include <string>

#include "quarl/statevector.hpp"

namespace quarl {

struct MockServerOptions {
    NoiseModel noise;
    /// Empty disables the bearer-token check.
    std::string token;
    /// Each job finishes after a latency drawn uniformly from [min_latency, max_latency].
    std::chrono::milliseconds min_latency{0};
    std::chrono::milliseconds max_latency{200};
    std::uint64_t latency_seed = 0;
};

/// Loopback job server implementing the remote contract. Submitted circuits are
/// run by the same shot emulator as EmulatedBackend, seeded by the request.
class MockJobServer {
  public:
    explicit MockJobServer(MockServerOptions options = {});
    ~MockJobServer();

    MockJobServer(const MockJobServer&) = delete;
    MockJobServer& operator=(const MockJobServer&) = delete;

    /// Binds 127.0.0.1 on `port` (0 picks a free port) and serves on a background thread.
    void start(int port = 0);
    void stop();
    /// Blocks until the background server thread exits.
    void join();

    int port() const;
    std::string endpoint() const;

    /// The next `n` submitted jobs end in the failed state.
    void inject_failures(int n);
    std::size_t jobs_submitted() const;

  private:
    struct State;
    std::unique_ptr<State> state_;
};

}  // namespace quarl
