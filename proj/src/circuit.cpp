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

#include "quarl/circuit.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace quarl {

std::size_t Genome::entangler_count() const {
    std::size_t count = 0;
    for (Gene g : genes) {
        if (g == Gene::Measure) {
            break;
        }
        if (g == Gene::Ent) {
            ++count;
        }
    }
    return count;
}

Gene gene_from_int(int value) {
    if (value < 0 || value > 3) {
        throw std::invalid_argument("gene value out of range {0,1,2,3}: " + std::to_string(value));
    }
    return static_cast<Gene>(value);
}

Genome parse_genome(std::string_view text) {
    Genome genome;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dash = text.find('-', pos);
        if (dash == std::string_view::npos) {
            dash = text.size();
        }
        std::string_view token = text.substr(pos, dash - pos);
        while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) {
            token.remove_prefix(1);
        }
        while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\n' ||
                                  token.back() == '\r')) {
            token.remove_suffix(1);
        }
        int value = -1;
        auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
            throw std::invalid_argument("unparsable genome text: '" + std::string(text) + "'");
        }
        genome.genes.push_back(gene_from_int(value));
        pos = dash + 1;
    }
    return genome;
}

std::string format_genome(const Genome& genome) {
    std::string out;
    for (std::size_t i = 0; i < genome.genes.size(); ++i) {
        if (i != 0) {
            out += '-';
        }
        out += static_cast<char>('0' + static_cast<int>(genome.genes[i]));
    }
    return out;
}

const char* component_name(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::Var:
            return "Var";
        case ComponentKind::Enc:
            return "Enc";
        case ComponentKind::Ent:
            return "Ent";
    }
    return "?";
}

const char* gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::RX:
            return "RX";
        case GateKind::RY:
            return "RY";
        case GateKind::RZ:
            return "RZ";
        case GateKind::H:
            return "H";
        case GateKind::CZ:
            return "CZ";
        case GateKind::CNOT:
            return "CNOT";
    }
    return "?";
}

CircuitIR decode_genome(const Genome& genome, std::size_t n_qubits) {
    if (n_qubits < 2) {
        throw std::invalid_argument("decode_genome: n_qubits must be >= 2 for circular entanglement, got " +
                                    std::to_string(n_qubits));
    }
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("decode_genome: n_qubits exceeds dense-simulation limit of " +
                                    std::to_string(kMaxQubits));
    }
    if (genome.genes.empty()) {
        throw std::invalid_argument("decode_genome: genome must contain at least one gene");
    }

    CircuitIR ir;
    ir.n_qubits = n_qubits;
    ir.terminator_appended = true;
    for (Gene g : genome.genes) {
        if (g == Gene::Measure) {
            ir.terminator_appended = false;
            break;
        }
        CircuitComponent c{};
        switch (g) {
            case Gene::Var:
                c = {ComponentKind::Var, ir.n_phi, kRotationsPerQubit * n_qubits};
                ir.n_phi += c.slot_count;
                break;
            case Gene::Enc:
                c = {ComponentKind::Enc, ir.n_lambda, n_qubits};
                ir.n_lambda += c.slot_count;
                break;
            case Gene::Ent:
                c = {ComponentKind::Ent, 0, 0};
                break;
            case Gene::Measure:
                break;
        }
        ir.components.push_back(c);
    }
    return ir;
}

double encode_feature(double s, EncodeSquash squash) {
    return squash == EncodeSquash::Arctan ? std::atan(s) : s;
}

namespace {

void check_length(const char* name, std::size_t got, std::size_t expected) {
    if (got != expected) {
        throw std::invalid_argument(std::string("bind_parameters: ") + name + " has length " +
                                    std::to_string(got) + ", expected " + std::to_string(expected));
    }
}

}  // namespace

BoundCircuitWithSources bind_parameters_traced(const CircuitIR& ir, std::span<const double> phi,
                                               std::span<const double> lambda,
                                               std::span<const double> state, EncodeSquash squash) {
    check_length("phi", phi.size(), ir.n_phi);
    check_length("lambda", lambda.size(), ir.n_lambda);
    check_length("state", state.size(), ir.n_qubits);

    constexpr GateKind kRotations[kRotationsPerQubit] = {GateKind::RX, GateKind::RY, GateKind::RZ};
    const auto n = static_cast<std::uint32_t>(ir.n_qubits);

    BoundCircuitWithSources out;
    out.circuit.n_qubits = ir.n_qubits;
    auto emit = [&](Gate g, AngleSource src) {
        if (!std::isfinite(g.angle)) {
            throw std::invalid_argument(std::string("bind_parameters: non-finite angle for ") + gate_name(g.kind) +
                                        " on qubit " + std::to_string(g.q0));
        }
        out.circuit.gates.push_back(g);
        out.sources.push_back(src);
    };

    for (const CircuitComponent& c : ir.components) {
        switch (c.kind) {
            case ComponentKind::Var:
                for (std::uint32_t q = 0; q < n; ++q) {
                    for (std::size_t r = 0; r < kRotationsPerQubit; ++r) {
                        const std::size_t slot = c.slot_begin + kRotationsPerQubit * q + r;
                        emit({kRotations[r], q, 0, phi[slot]}, {AngleSource::Group::Phi, slot, 1.0});
                    }
                }
                break;
            case ComponentKind::Enc:
                for (std::uint32_t q = 0; q < n; ++q) {
                    const std::size_t slot = c.slot_begin + q;
                    const double feature = encode_feature(state[q], squash);
                    emit({GateKind::RX, q, 0, lambda[slot] * feature}, {AngleSource::Group::Lambda, slot, feature});
                }
                break;
            case ComponentKind::Ent:
                for (std::uint32_t q = 0; q < n; ++q) {
                    emit({GateKind::CZ, q, (q + 1) % n, 0.0}, {});
                }
                break;
        }
    }
    return out;
}

BoundCircuit bind_parameters(const CircuitIR& ir, std::span<const double> phi, std::span<const double> lambda,
                             std::span<const double> state, EncodeSquash squash) {
    return bind_parameters_traced(ir, phi, lambda, state, squash).circuit;
}

}  // namespace quarl
