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

#include "quarl/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quarl/random.hpp"

namespace quarl {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Visits every amplitude pair that differs only in bit q.
template <typename Kernel>
void for_each_pair(std::vector<Amplitude>& amps, std::uint32_t q, Kernel&& kernel) {
    const std::size_t stride = std::size_t{1} << q;
    const std::size_t dim = amps.size();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t j = 0; j < stride; ++j) {
            kernel(amps[base + j], amps[base + j + stride]);
        }
    }
}

void check_qubit(std::uint32_t q, std::size_t n) {
    if (q >= n) {
        throw std::invalid_argument("gate targets qubit " + std::to_string(q) + " on a " + std::to_string(n) +
                                    "-qubit register");
    }
}

}  // namespace

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("StateVector: at most " + std::to_string(kMaxQubits) + " qubits supported");
    }
    amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

double StateVector::norm_squared() const {
    double total = 0.0;
    for (const Amplitude& a : amps_) {
        total += std::norm(a);
    }
    return total;
}

void StateVector::apply_rx(std::uint32_t q, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    for_each_pair(amps_, q, [c, s](Amplitude& a0, Amplitude& a1) {
        // [[c, -is], [-is, c]]
        const Amplitude x0 = a0;
        const Amplitude x1 = a1;
        a0 = {c * x0.real() + s * x1.imag(), c * x0.imag() - s * x1.real()};
        a1 = {c * x1.real() + s * x0.imag(), c * x1.imag() - s * x0.real()};
    });
}

void StateVector::apply_ry(std::uint32_t q, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    for_each_pair(amps_, q, [c, s](Amplitude& a0, Amplitude& a1) {
        const Amplitude x0 = a0;
        a0 = c * x0 - s * a1;
        a1 = s * x0 + c * a1;
    });
}

void StateVector::apply_rz(std::uint32_t q, double theta) {
    const Amplitude lo = std::polar(1.0, -theta / 2);
    const Amplitude hi = std::polar(1.0, theta / 2);
    for_each_pair(amps_, q, [lo, hi](Amplitude& a0, Amplitude& a1) {
        a0 *= lo;
        a1 *= hi;
    });
}

void StateVector::apply_h(std::uint32_t q) {
    for_each_pair(amps_, q, [](Amplitude& a0, Amplitude& a1) {
        const Amplitude x0 = a0;
        a0 = kInvSqrt2 * (x0 + a1);
        a1 = kInvSqrt2 * (x0 - a1);
    });
}

void StateVector::apply_x(std::uint32_t q) {
    for_each_pair(amps_, q, [](Amplitude& a0, Amplitude& a1) { std::swap(a0, a1); });
}

void StateVector::apply_y(std::uint32_t q) {
    for_each_pair(amps_, q, [](Amplitude& a0, Amplitude& a1) {
        const Amplitude x0 = a0;
        a0 = Amplitude{a1.imag(), -a1.real()};  // -i * a1
        a1 = Amplitude{-x0.imag(), x0.real()};  // i * a0
    });
}

void StateVector::apply_z(std::uint32_t q) {
    for_each_pair(amps_, q, [](Amplitude&, Amplitude& a1) { a1 = -a1; });
}

void StateVector::apply_cz(std::uint32_t a, std::uint32_t b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & mask) == mask) {
            amps_[i] = -amps_[i];
        }
    }
}

void StateVector::apply_cnot(std::uint32_t control, std::uint32_t target) {
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && !(i & tbit)) {
            std::swap(amps_[i], amps_[i | tbit]);
        }
    }
}

void StateVector::apply(const Gate& gate) {
    check_qubit(gate.q0, n_qubits_);
    if (is_two_qubit(gate.kind)) {
        check_qubit(gate.q1, n_qubits_);
        if (gate.q0 == gate.q1) {
            throw std::invalid_argument(std::string(gate_name(gate.kind)) + " needs two distinct qubits");
        }
    }
    switch (gate.kind) {
        case GateKind::RX:
            apply_rx(gate.q0, gate.angle);
            break;
        case GateKind::RY:
            apply_ry(gate.q0, gate.angle);
            break;
        case GateKind::RZ:
            apply_rz(gate.q0, gate.angle);
            break;
        case GateKind::H:
            apply_h(gate.q0);
            break;
        case GateKind::CZ:
            apply_cz(gate.q0, gate.q1);
            break;
        case GateKind::CNOT:
            apply_cnot(gate.q0, gate.q1);
            break;
    }
}

PauliZString::PauliZString(std::initializer_list<std::uint32_t> qubits)
    : PauliZString(std::span<const std::uint32_t>(qubits.begin(), qubits.size())) {}

PauliZString::PauliZString(std::span<const std::uint32_t> qubits) {
    for (std::uint32_t q : qubits) {
        if (q >= 64) {
            throw std::invalid_argument("PauliZString: qubit index " + std::to_string(q) + " out of range");
        }
        mask_ |= std::uint64_t{1} << q;
    }
}

PauliZString PauliZString::all(std::size_t n_qubits) {
    PauliZString z;
    z.mask_ = n_qubits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_qubits) - 1;
    return z;
}

std::vector<std::uint32_t> PauliZString::qubits() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t q = 0; q < 64; ++q) {
        if (mask_ >> q & 1U) {
            out.push_back(q);
        }
    }
    return out;
}

int PauliZString::eigenvalue(std::uint64_t basis_index) const {
    return (std::popcount(basis_index & mask_) & 1) ? -1 : 1;
}

void PauliZString::check(std::size_t n_qubits) const {
    if (n_qubits < 64 && (mask_ >> n_qubits) != 0) {
        throw std::invalid_argument("observable " + to_string() + " acts outside a " + std::to_string(n_qubits) +
                                    "-qubit register");
    }
}

std::string PauliZString::to_string() const {
    std::string out;
    for (std::uint32_t q : qubits()) {
        out += "Z" + std::to_string(q);
    }
    return out.empty() ? "I" : out;
}

void NoiseModel::validate() const {
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
        throw std::invalid_argument("noise probabilities must lie in [0, 1]");
    }
}

std::string bitstring(std::uint64_t basis_index, std::size_t n_qubits) {
    std::string s(n_qubits, '0');
    for (std::size_t q = 0; q < n_qubits; ++q) {
        if (basis_index >> q & 1U) {
            s[q] = '1';
        }
    }
    return s;
}

StateVector simulate(std::size_t n_qubits, std::span<const Gate> gates) {
    StateVector state(n_qubits);
    for (const Gate& g : gates) {
        state.apply(g);
    }
    return state;
}

StateVector simulate(const BoundCircuit& circuit) {
    return simulate(circuit.n_qubits, circuit.gates);
}

namespace {

void apply_random_pauli(StateVector& state, std::uint32_t q, Rng& rng) {
    switch (uniform_index(rng, 3)) {
        case 0:
            state.apply_x(q);
            break;
        case 1:
            state.apply_y(q);
            break;
        default:
            state.apply_z(q);
            break;
    }
}

// One error event: Pauli `pauli` (0=X, 1=Y, 2=Z) on `qubit` right after gate `gate`.
struct ErrorEvent {
    std::size_t gate;
    std::uint32_t qubit;
    std::uint8_t pauli;
};

void apply_pauli(StateVector& state, std::uint32_t q, std::uint8_t pauli) {
    switch (pauli) {
        case 0:
            state.apply_x(q);
            break;
        case 1:
            state.apply_y(q);
            break;
        default:
            state.apply_z(q);
            break;
    }
}

}  // namespace

StateVector simulate(std::size_t n_qubits, std::span<const Gate> gates, const std::optional<NoiseModel>& noise,
                     std::uint64_t seed) {
    if (!noise || noise->is_noiseless()) {
        return simulate(n_qubits, gates);
    }
    noise->validate();
    Rng rng(seed);
    StateVector state(n_qubits);
    for (const Gate& g : gates) {
        state.apply(g);
        if (is_two_qubit(g.kind)) {
            for (std::uint32_t q : {g.q0, g.q1}) {
                if (uniform01(rng) < noise->p2) {
                    apply_random_pauli(state, q, rng);
                }
            }
        } else if (uniform01(rng) < noise->p1) {
            apply_random_pauli(state, g.q0, rng);
        }
    }
    return state;
}

StateVector simulate(const BoundCircuit& circuit, const std::optional<NoiseModel>& noise, std::uint64_t seed) {
    return simulate(circuit.n_qubits, circuit.gates, noise, seed);
}

double expectation(const StateVector& state, const PauliZString& obs) {
    obs.check(state.n_qubits());
    const auto amps = state.amplitudes();
    double total = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        total += obs.eigenvalue(b) * std::norm(amps[b]);
    }
    return std::clamp(total, -1.0, 1.0);
}

namespace {

std::vector<double> cumulative_probabilities(const StateVector& state) {
    const auto amps = state.amplitudes();
    std::vector<double> cdf(amps.size());
    double running = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        running += std::norm(amps[b]);
        cdf[b] = running;
    }
    return cdf;
}

std::uint64_t draw_index(std::span<const double> cdf, Rng& rng) {
    const double u = uniform01(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) {
        --it;
    }
    return static_cast<std::uint64_t>(it - cdf.begin());
}

Counts histogram_to_counts(const std::vector<std::uint64_t>& tally, std::size_t n_qubits, std::uint64_t shots) {
    Counts counts;
    counts.shots = shots;
    for (std::size_t b = 0; b < tally.size(); ++b) {
        if (tally[b] != 0) {
            counts.histogram.emplace(bitstring(b, n_qubits), tally[b]);
        }
    }
    return counts;
}

}  // namespace

Counts sample_counts(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("sample_counts: shots must be >= 1");
    }
    Rng rng(seed);
    const std::vector<double> cdf = cumulative_probabilities(state);
    std::vector<std::uint64_t> tally(cdf.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        ++tally[draw_index(cdf, rng)];
    }
    return histogram_to_counts(tally, state.n_qubits(), shots);
}

Counts sample_noisy_counts(std::size_t n_qubits, std::span<const Gate> gates, const NoiseModel& noise,
                           std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("sample_noisy_counts: shots must be >= 1");
    }
    noise.validate();
    Rng rng(seed);
    const StateVector ideal = simulate(n_qubits, gates);
    const std::vector<double> ideal_cdf = cumulative_probabilities(ideal);
    std::vector<std::uint64_t> tally(ideal_cdf.size(), 0);

    std::vector<ErrorEvent> events;
    for (std::uint64_t s = 0; s < shots; ++s) {
        events.clear();
        if (!noise.is_noiseless()) {
            for (std::size_t k = 0; k < gates.size(); ++k) {
                const Gate& g = gates[k];
                if (is_two_qubit(g.kind)) {
                    for (std::uint32_t q : {g.q0, g.q1}) {
                        if (uniform01(rng) < noise.p2) {
                            events.push_back({k, q, static_cast<std::uint8_t>(uniform_index(rng, 3))});
                        }
                    }
                } else if (uniform01(rng) < noise.p1) {
                    events.push_back({k, g.q0, static_cast<std::uint8_t>(uniform_index(rng, 3))});
                }
            }
        }
        if (events.empty()) {
            ++tally[draw_index(ideal_cdf, rng)];
            continue;
        }
        StateVector state(n_qubits);
        std::size_t next = 0;
        for (std::size_t k = 0; k < gates.size(); ++k) {
            state.apply(gates[k]);
            while (next < events.size() && events[next].gate == k) {
                apply_pauli(state, events[next].qubit, events[next].pauli);
                ++next;
            }
        }
        const std::vector<double> cdf = cumulative_probabilities(state);
        ++tally[draw_index(cdf, rng)];
    }
    return histogram_to_counts(tally, n_qubits, shots);
}

double estimate_expectation(const Counts& counts, const PauliZString& obs) {
    if (counts.shots == 0 || counts.histogram.empty()) {
        throw std::invalid_argument("estimate_expectation: empty counts");
    }
    double total = 0.0;
    for (const auto& [bits, count] : counts.histogram) {
        std::uint64_t index = 0;
        for (std::size_t q = 0; q < bits.size(); ++q) {
            if (bits[q] == '1') {
                index |= std::uint64_t{1} << q;
            }
        }
        total += obs.eigenvalue(index) * static_cast<double>(count);
    }
    return total / static_cast<double>(counts.shots);
}

ExpectationWithGradient parameter_shift(const CircuitIR& ir, std::span<const double> phi,
                                        std::span<const double> lambda, std::span<const double> state,
                                        const PauliZString& obs, EncodeSquash squash) {
    obs.check(ir.n_qubits);
    const BoundCircuitWithSources bound = bind_parameters_traced(ir, phi, lambda, state, squash);
    const std::vector<Gate>& gates = bound.circuit.gates;

    ExpectationWithGradient out;
    out.grad.dphi.assign(ir.n_phi, 0.0);
    out.grad.dlambda.assign(ir.n_lambda, 0.0);

    constexpr double kShift = std::numbers::pi / 2;
    StateVector prefix(ir.n_qubits);
    for (std::size_t k = 0; k < gates.size(); ++k) {
        const AngleSource& src = bound.sources[k];
        if (src.group != AngleSource::Group::None && src.scale != 0.0) {
            double shifted[2];
            for (int side = 0; side < 2; ++side) {
                StateVector psi = prefix;
                Gate g = gates[k];
                g.angle += side == 0 ? kShift : -kShift;
                psi.apply(g);
                for (std::size_t j = k + 1; j < gates.size(); ++j) {
                    psi.apply(gates[j]);
                }
                shifted[side] = expectation(psi, obs);
            }
            const double d = 0.5 * (shifted[0] - shifted[1]) * src.scale;
            if (src.group == AngleSource::Group::Phi) {
                out.grad.dphi[src.index] += d;
            } else {
                out.grad.dlambda[src.index] += d;
            }
        }
        prefix.apply(gates[k]);
    }
    out.value = expectation(prefix, obs);
    return out;
}

CircuitGradient parameter_shift_gradient(const CircuitIR& ir, std::span<const double> phi,
                                         std::span<const double> lambda, std::span<const double> state,
                                         const PauliZString& obs, EncodeSquash squash) {
    return parameter_shift(ir, phi, lambda, state, obs, squash).grad;
}

}  // namespace quarl
