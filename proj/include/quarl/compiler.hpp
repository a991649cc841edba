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

#include <cstddef>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "quarl/circuit.hpp"

namespace quarl {

/// Undirected qubit connectivity. Pairs are stored with first < second.
class CouplingMap {
  public:
    CouplingMap() = default;
    explicit CouplingMap(std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

    /// Nearest-neighbour chain 0-1-...-(n-1).
    static CouplingMap linear(std::size_t n_qubits);

    bool connected(std::uint32_t a, std::uint32_t b) const;
    const std::set<std::pair<std::uint32_t, std::uint32_t>>& edges() const { return edges_; }
    std::uint32_t max_index() const;

  private:
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges_;
};

/// Gates restricted to the basis {RX, RY, RZ, H, CNOT}.
struct CompiledCircuit {
    std::size_t n_qubits = 0;
    std::vector<Gate> gates;

    bool operator==(const CompiledCircuit&) const = default;
};

struct CompileStats {
    std::size_t total_gates = 0;
    std::size_t cnot_count = 0;
    std::size_t depth = 0;

    bool operator==(const CompileStats&) const = default;
};

struct LowerOptions {
    bool cancel_hadamards = true;
};

/// CZ(a,b) on an edge becomes H(b) CNOT(a,b) H(b); CZ on a non-edge is dropped.
/// Rotations pass through. A single peephole pass then removes H pairs that are
/// adjacent on the same qubit.
CompiledCircuit lower(const BoundCircuit& circuit, const CouplingMap& coupling, LowerOptions options = {});

CompileStats stats(const CompiledCircuit& compiled);

/// Binds the genome with zero parameters and inputs, lowers it to a linear chain
/// and reports the cost. Gate counts do not depend on the angle values.
CompileStats genome_stats(const Genome& genome, std::size_t n_qubits);

}  // namespace quarl
