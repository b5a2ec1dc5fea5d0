// Copyright 2026 The qstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "qstack/circuit.hpp"
#include "qstack/counts.hpp"
#include "qstack/device.hpp"
#include "qstack/readout.hpp"

namespace qstack {

using Amplitude = std::complex<double>;
/// Basis index b reads qubit 0 as its least-significant bit.
using StateVector = std::vector<Amplitude>;
using Matrix2 = std::array<std::array<Amplitude, 2>, 2>;

inline constexpr int kDefaultMaxQubits = 20;
inline constexpr int kMaxUnitaryQubits = 10;

/// Row-major dense square matrix.
struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<Amplitude> data;

    Amplitude& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const Amplitude& operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }
};

/// Textbook matrix of a single-qubit gate. Throws InvalidArgument for 2q gates.
Matrix2 gate_matrix(const Gate& gate);

/// Applies every unitary gate of `circuit` to `state` (measures are rejected, barriers skipped).
void apply_circuit(StateVector& state, const QuantumCircuit& circuit);
void apply_gate(StateVector& state, const Gate& gate);

StateVector statevector(const QuantumCircuit& circuit, int max_qubits = kDefaultMaxQubits);
DenseMatrix unitary(const QuantumCircuit& circuit);

/// Exact outcome distribution over clbits (index bit c = clbit c) for circuits with
/// n_qubits within the statevector cap.
std::vector<double> measured_distribution(const QuantumCircuit& circuit, int max_qubits = kDefaultMaxQubits);

struct SampleOptions {
    bool noise = true;
    /// Cap on any interacting qubit cluster.
    int max_qubits = kDefaultMaxQubits;
};

/// Draws `shots` terminal-measurement samples. Qubits that never interact are simulated
/// as independent clusters, so the cap applies per cluster rather than per device.
/// With noise, each measured bit flips with the device's eps01/eps10 for that qubit.
Counts sample(const QuantumCircuit& circuit, std::uint64_t shots, std::uint64_t seed,
              const DeviceSpec& device, const SampleOptions& opts = {});

/// Runs prepare-all-0 and prepare-all-1 on every device qubit (seeds `seed` and `seed + 1`)
/// and estimates each qubit's confusion matrix from the flip frequencies.
std::vector<ConfusionMatrix> calibrate_readout(const DeviceSpec& device, std::uint64_t shots,
                                               std::uint64_t seed);

} // namespace qstack
