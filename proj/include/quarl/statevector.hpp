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

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quarl/circuit.hpp"

namespace quarl {

using Amplitude = std::complex<double>;

/// Dense state over n qubits. Basis index bit q holds qubit q.
class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(std::size_t n_qubits);

    std::size_t n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const Amplitude> amplitudes() const { return amps_; }
    std::span<Amplitude> amplitudes() { return amps_; }
    double norm_squared() const;

    void apply(const Gate& gate);
    void apply_rx(std::uint32_t q, double theta);
    void apply_ry(std::uint32_t q, double theta);
    void apply_rz(std::uint32_t q, double theta);
    void apply_h(std::uint32_t q);
    void apply_x(std::uint32_t q);
    void apply_y(std::uint32_t q);
    void apply_z(std::uint32_t q);
    void apply_cz(std::uint32_t a, std::uint32_t b);
    void apply_cnot(std::uint32_t control, std::uint32_t target);

  private:
    std::size_t n_qubits_;
    std::vector<Amplitude> amps_;
};

/// Product of Pauli-Z operators on a set of qubits.
class PauliZString {
  public:
    PauliZString() = default;
    PauliZString(std::initializer_list<std::uint32_t> qubits);
    explicit PauliZString(std::span<const std::uint32_t> qubits);

    /// Z on every qubit 0..n-1.
    static PauliZString all(std::size_t n_qubits);

    std::uint64_t mask() const { return mask_; }
    std::vector<std::uint32_t> qubits() const;
    /// +1 or -1 for the given basis index.
    int eigenvalue(std::uint64_t basis_index) const;
    /// Throws std::invalid_argument if any index is >= n_qubits.
    void check(std::size_t n_qubits) const;
    std::string to_string() const;

  private:
    std::uint64_t mask_ = 0;
};

struct NoiseModel {
    double p1 = 0.0;  // per single-qubit gate
    double p2 = 0.0;  // per involved qubit of a two-qubit gate

    bool is_noiseless() const { return p1 == 0.0 && p2 == 0.0; }
    /// Throws std::invalid_argument when a probability lies outside [0, 1].
    void validate() const;
};

/// Bitstring histogram. Character q of a key is the outcome of qubit q.
struct Counts {
    std::map<std::string, std::uint64_t> histogram;
    std::uint64_t shots = 0;

    bool operator==(const Counts&) const = default;
};

std::string bitstring(std::uint64_t basis_index, std::size_t n_qubits);

StateVector simulate(std::size_t n_qubits, std::span<const Gate> gates);
StateVector simulate(const BoundCircuit& circuit);

/// One noise trajectory: after each gate a uniformly random Pauli is inserted on
/// each affected qubit with probability p1 (single-qubit gate) or p2 (two-qubit gate).
/// A noiseless model ignores the seed.
StateVector simulate(const BoundCircuit& circuit, const std::optional<NoiseModel>& noise, std::uint64_t seed);
StateVector simulate(std::size_t n_qubits, std::span<const Gate> gates, const std::optional<NoiseModel>& noise,
                     std::uint64_t seed);

double expectation(const StateVector& state, const PauliZString& obs);

Counts sample_counts(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

/// Device-readout emulation: every shot runs its own noise trajectory. Shots whose
/// sampled error pattern is empty reuse the ideal state.
Counts sample_noisy_counts(std::size_t n_qubits, std::span<const Gate> gates, const NoiseModel& noise,
                           std::uint64_t shots, std::uint64_t seed);

double estimate_expectation(const Counts& counts, const PauliZString& obs);

struct CircuitGradient {
    std::vector<double> dphi;
    std::vector<double> dlambda;
};

/// Exact expectation and its gradient with respect to phi and lambda by the
/// two-term parameter-shift rule; lambda derivatives carry the encoding chain factor.
struct ExpectationWithGradient {
    double value = 0.0;
    CircuitGradient grad;
};

ExpectationWithGradient parameter_shift(const CircuitIR& ir, std::span<const double> phi,
                                        std::span<const double> lambda, std::span<const double> state,
                                        const PauliZString& obs, EncodeSquash squash = EncodeSquash::None);

CircuitGradient parameter_shift_gradient(const CircuitIR& ir, std::span<const double> phi,
                                         std::span<const double> lambda, std::span<const double> state,
                                         const PauliZString& obs, EncodeSquash squash = EncodeSquash::None);

}  // namespace quarl
