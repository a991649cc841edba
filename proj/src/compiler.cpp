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

#include "quarl/compiler.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace quarl {

CouplingMap::CouplingMap(std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
    for (auto [a, b] : edges) {
        if (a == b) {
            throw std::invalid_argument("CouplingMap: self-loop on qubit " + std::to_string(a));
        }
        edges_.emplace(std::min(a, b), std::max(a, b));
    }
}

CouplingMap CouplingMap::linear(std::size_t n_qubits) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 0; i + 1 < n_qubits; ++i) {
        edges.emplace_back(i, i + 1);
    }
    return CouplingMap(std::move(edges));
}

bool CouplingMap::connected(std::uint32_t a, std::uint32_t b) const {
    return edges_.contains({std::min(a, b), std::max(a, b)});
}

std::uint32_t CouplingMap::max_index() const {
    std::uint32_t m = 0;
    for (const auto& [a, b] : edges_) {
        m = std::max(m, b);
    }
    return m;
}

CompiledCircuit lower(const BoundCircuit& circuit, const CouplingMap& coupling, LowerOptions options) {
    std::vector<Gate> raw;
    raw.reserve(circuit.gates.size() * 2);
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::RX:
            case GateKind::RY:
            case GateKind::RZ:
            case GateKind::H:
                raw.push_back(g);
                break;
            case GateKind::CNOT:
                if (coupling.connected(g.q0, g.q1)) {
                    raw.push_back(g);
                }
                break;
            case GateKind::CZ:
                if (coupling.connected(g.q0, g.q1)) {
                    raw.push_back({GateKind::H, g.q1, 0, 0.0});
                    raw.push_back({GateKind::CNOT, g.q0, g.q1, 0.0});
                    raw.push_back({GateKind::H, g.q1, 0, 0.0});
                }
                break;
        }
    }

    CompiledCircuit out;
    out.n_qubits = circuit.n_qubits;
    if (!options.cancel_hadamards) {
        out.gates = std::move(raw);
        return out;
    }

    // last[q] is the index in out.gates of the most recent surviving gate on q.
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> last(circuit.n_qubits, kNone);
    std::vector<bool> removed;
    out.gates.reserve(raw.size());
    for (const Gate& g : raw) {
        if (g.kind == GateKind::H) {
            const std::size_t prev = last[g.q0];
            if (prev != kNone && !removed[prev] && out.gates[prev].kind == GateKind::H) {
                removed[prev] = true;
                last[g.q0] = kNone;
                continue;
            }
        }
        out.gates.push_back(g);
        removed.push_back(false);
        last[g.q0] = out.gates.size() - 1;
        if (is_two_qubit(g.kind)) {
            last[g.q1] = out.gates.size() - 1;
        }
    }
    std::vector<Gate> kept;
    kept.reserve(out.gates.size());
    for (std::size_t i = 0; i < out.gates.size(); ++i) {
        if (!removed[i]) {
            kept.push_back(out.gates[i]);
        }
    }
    out.gates = std::move(kept);
    return out;
}

CompileStats stats(const CompiledCircuit& compiled) {
    CompileStats s;
    s.total_gates = compiled.gates.size();
    std::vector<std::size_t> layer(compiled.n_qubits, 0);
    for (const Gate& g : compiled.gates) {
        if (g.kind == GateKind::CNOT) {
            ++s.cnot_count;
        }
        if (is_two_qubit(g.kind)) {
            const std::size_t l = std::max(layer.at(g.q0), layer.at(g.q1)) + 1;
            layer[g.q0] = layer[g.q1] = l;
        } else {
            ++layer.at(g.q0);
        }
    }
    for (std::size_t l : layer) {
        s.depth = std::max(s.depth, l);
    }
    return s;
}

CompileStats genome_stats(const Genome& genome, std::size_t n_qubits) {
    const CircuitIR ir = decode_genome(genome, n_qubits);
    const std::vector<double> phi(ir.n_phi, 0.0);
    const std::vector<double> lambda(ir.n_lambda, 0.0);
    const std::vector<double> state(n_qubits, 0.0);
    return stats(lower(bind_parameters(ir, phi, lambda, state), CouplingMap::linear(n_qubits)));
}

}  // namespace quarl
