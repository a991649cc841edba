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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quarl {

/// Architecture gene. The numeric values are part of the genome text format.
enum class Gene : std::uint8_t {
    Measure = 0,
    Var = 1,
    Enc = 2,
    Ent = 3,
};

constexpr std::size_t kDefaultGenomeLength = 16;
constexpr std::size_t kMaxQubits = 24;

/// Rotations applied per qubit by a variational block, in application order.
constexpr std::size_t kRotationsPerQubit = 3;

/// Fixed-length gene string. Everything after the first Measure gene is ignored.
struct Genome {
    std::vector<Gene> genes;

    bool operator==(const Genome&) const = default;

    /// Number of entangling genes before the terminator.
    std::size_t entangler_count() const;
};

/// Parses the dash-separated text form, e.g. "3-1-1-2-0". Throws std::invalid_argument.
Genome parse_genome(std::string_view text);
std::string format_genome(const Genome& genome);
Gene gene_from_int(int value);

enum class ComponentKind : std::uint8_t { Var, Enc, Ent };

const char* component_name(ComponentKind kind);

struct CircuitComponent {
    ComponentKind kind;
    /// Start of the slot range in phi (Var) or lambda (Enc). Zero for Ent.
    std::size_t slot_begin = 0;
    std::size_t slot_count = 0;

    bool operator==(const CircuitComponent&) const = default;
};

struct CircuitIR {
    std::size_t n_qubits = 0;
    std::vector<CircuitComponent> components;
    std::size_t n_phi = 0;
    std::size_t n_lambda = 0;
    /// True when the genome had no Measure gene and one was implied at the end.
    bool terminator_appended = false;

    bool operator==(const CircuitIR&) const = default;
};

/// Throws std::invalid_argument for n_qubits outside [2, kMaxQubits] or an empty genome.
CircuitIR decode_genome(const Genome& genome, std::size_t n_qubits);

enum class GateKind : std::uint8_t { RX, RY, RZ, H, CZ, CNOT };

const char* gate_name(GateKind kind);
constexpr bool is_two_qubit(GateKind kind) { return kind == GateKind::CZ || kind == GateKind::CNOT; }
constexpr bool is_rotation(GateKind kind) {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

/// A concrete gate. For CNOT q0 is the control; for single-qubit gates q1 is unused.
struct Gate {
    GateKind kind;
    std::uint32_t q0 = 0;
    std::uint32_t q1 = 0;
    double angle = 0.0;

    bool operator==(const Gate&) const = default;
};

struct BoundCircuit {
    std::size_t n_qubits = 0;
    std::vector<Gate> gates;

    bool operator==(const BoundCircuit&) const = default;
};

/// How an encoding block maps an input feature onto a rotation angle.
enum class EncodeSquash : std::uint8_t {
    None,    // angle = lambda * s
    Arctan,  // angle = lambda * atan(s)
};

/// Feature transform applied before the lambda scaling.
double encode_feature(double s, EncodeSquash squash);

/// Where a bound gate's angle came from; used for differentiation.
struct AngleSource {
    enum class Group : std::uint8_t { None, Phi, Lambda };
    Group group = Group::None;
    std::size_t index = 0;
    /// d(angle)/d(parameter).
    double scale = 0.0;
};

struct BoundCircuitWithSources {
    BoundCircuit circuit;
    std::vector<AngleSource> sources;  // one per gate
};

/// Emits the concrete gate list. Throws std::invalid_argument on dimension mismatch.
BoundCircuit bind_parameters(const CircuitIR& ir, std::span<const double> phi,
                             std::span<const double> lambda, std::span<const double> state,
                             EncodeSquash squash = EncodeSquash::None);

BoundCircuitWithSources bind_parameters_traced(const CircuitIR& ir, std::span<const double> phi,
                                               std::span<const double> lambda,
                                               std::span<const double> state,
                                               EncodeSquash squash = EncodeSquash::None);

}  // namespace quarl
