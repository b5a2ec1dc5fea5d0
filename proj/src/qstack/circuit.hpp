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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qstack {

enum class GateKind {
    H, X, Y, Z, S, Sdg, T, Tdg, SX, RX, RY, RZ, CX, CZ, Swap, Measure, Barrier,
};

std::string_view gate_name(GateKind kind) noexcept;
std::optional<GateKind> gate_from_name(std::string_view name) noexcept;

/// Number of qubit operands, or -1 for variadic (barrier).
int gate_arity(GateKind kind) noexcept;
int gate_param_count(GateKind kind) noexcept;
bool is_two_qubit(GateKind kind) noexcept;

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<int> qubits;
    std::vector<double> params;
    int clbit = -1; // measure only

    static Gate one(GateKind kind, int q) { return Gate{kind, {q}, {}, -1}; }
    static Gate rotation(GateKind kind, int q, double theta) { return Gate{kind, {q}, {theta}, -1}; }
    static Gate two(GateKind kind, int a, int b) { return Gate{kind, {a, b}, {}, -1}; }
    static Gate measure(int q, int c) { return Gate{GateKind::Measure, {q}, {}, c}; }
    static Gate barrier(std::vector<int> qs) { return Gate{GateKind::Barrier, std::move(qs), {}, -1}; }

    [[nodiscard]] std::string_view name() const noexcept { return gate_name(kind); }

    // Bitwise comparison of params so that -0.0 and 0.0 stay distinct after a round trip.
    friend bool operator==(const Gate& a, const Gate& b) noexcept;
};

/// Gate-list IR. Single quantum register `q` and single classical register `c`.
class QuantumCircuit {
public:
    QuantumCircuit() : QuantumCircuit(1, 0) {}
    explicit QuantumCircuit(int n_qubits, int n_clbits = 0);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] int n_clbits() const noexcept { return n_clbits_; }
    [[nodiscard]] const std::vector<Gate>& gates() const noexcept { return gates_; }
    [[nodiscard]] bool empty() const noexcept { return gates_.empty(); }

    /// Appends after checking the gate against this circuit's invariants.
    QuantumCircuit& append(Gate gate);

    QuantumCircuit& h(int q) { return append(Gate::one(GateKind::H, q)); }
    QuantumCircuit& x(int q) { return append(Gate::one(GateKind::X, q)); }
    QuantumCircuit& rz(int q, double theta) { return append(Gate::rotation(GateKind::RZ, q, theta)); }
    QuantumCircuit& cx(int control, int target) { return append(Gate::two(GateKind::CX, control, target)); }
    QuantumCircuit& measure(int q, int c) { return append(Gate::measure(q, c)); }

    [[nodiscard]] bool has_measurements() const noexcept;
    /// Copy without measure gates (barriers kept).
    [[nodiscard]] QuantumCircuit without_measurements() const;

    /// Re-checks every invariant; throws InvalidCircuit / IndexOutOfRange.
    void validate() const;

    friend bool operator==(const QuantumCircuit&, const QuantumCircuit&) = default;

private:
    int n_qubits_ = 1;
    int n_clbits_ = 0;
    std::vector<Gate> gates_;
    std::vector<char> measured_; // per qubit
    std::vector<char> written_;  // per clbit
};

/// Checks a gate in isolation: arity, distinct operands, finite params, index ranges.
void check_gate(const Gate& gate, int n_qubits, int n_clbits);

struct CircuitMetrics {
    std::size_t gate_count = 0;
    std::size_t two_qubit_count = 0;
    std::size_t depth = 0;

    friend bool operator==(const CircuitMetrics&, const CircuitMetrics&) = default;
};

CircuitMetrics circuit_metrics(const QuantumCircuit& circuit);

} // namespace qstack
