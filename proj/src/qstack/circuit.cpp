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

#include "qstack/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <utility>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

struct GateInfo {
    GateKind kind;
    std::string_view name;
    int arity;
    int params;
};

constexpr std::array<GateInfo, 17> kGateTable{{
    {GateKind::H, "h", 1, 0},
    {GateKind::X, "x", 1, 0},
    {GateKind::Y, "y", 1, 0},
    {GateKind::Z, "z", 1, 0},
    {GateKind::S, "s", 1, 0},
    {GateKind::Sdg, "sdg", 1, 0},
    {GateKind::T, "t", 1, 0},
    {GateKind::Tdg, "tdg", 1, 0},
    {GateKind::SX, "sx", 1, 0},
    {GateKind::RX, "rx", 1, 1},
    {GateKind::RY, "ry", 1, 1},
    {GateKind::RZ, "rz", 1, 1},
    {GateKind::CX, "cx", 2, 0},
    {GateKind::CZ, "cz", 2, 0},
    {GateKind::Swap, "swap", 2, 0},
    {GateKind::Measure, "measure", 1, 0},
    {GateKind::Barrier, "barrier", -1, 0},
}};

const GateInfo& info(GateKind kind) noexcept {
    return kGateTable[static_cast<std::size_t>(kind)];
}

} // namespace

std::string_view gate_name(GateKind kind) noexcept { return info(kind).name; }

std::optional<GateKind> gate_from_name(std::string_view name) noexcept {
    for (const auto& g : kGateTable) {
        if (g.name == name) {
            return g.kind;
        }
    }
    return std::nullopt;
}

int gate_arity(GateKind kind) noexcept { return info(kind).arity; }
int gate_param_count(GateKind kind) noexcept { return info(kind).params; }

bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::CX || kind == GateKind::CZ || kind == GateKind::Swap;
}

bool operator==(const Gate& a, const Gate& b) noexcept {
    if (a.kind != b.kind || a.qubits != b.qubits || a.clbit != b.clbit ||
        a.params.size() != b.params.size()) {
        return false;
    }
    return a.params.empty() ||
           std::memcmp(a.params.data(), b.params.data(), a.params.size() * sizeof(double)) == 0;
}

void check_gate(const Gate& gate, int n_qubits, int n_clbits) {
    const int arity = gate_arity(gate.kind);
    if (arity >= 0 && static_cast<int>(gate.qubits.size()) != arity) {
        raise(ErrorCode::InvalidCircuit,
              fmt::format("gate '{}' expects {} qubit operand(s), got {}", gate.name(), arity,
                          gate.qubits.size()));
    }
    if (arity < 0 && gate.qubits.empty()) {
        raise(ErrorCode::InvalidCircuit, "barrier needs at least one qubit");
    }
    if (static_cast<int>(gate.params.size()) != gate_param_count(gate.kind)) {
        raise(ErrorCode::InvalidCircuit,
              fmt::format("gate '{}' expects {} parameter(s), got {}", gate.name(),
                          gate_param_count(gate.kind), gate.params.size()));
    }
    for (double p : gate.params) {
        if (!std::isfinite(p)) {
            raise(ErrorCode::InvalidCircuit, fmt::format("gate '{}' has a non-finite angle", gate.name()));
        }
    }
    for (std::size_t i = 0; i < gate.qubits.size(); ++i) {
        const int q = gate.qubits[i];
        if (q < 0 || q >= n_qubits) {
            raise(ErrorCode::IndexOutOfRange,
                  fmt::format("qubit index {} out of range for {} qubit(s)", q, n_qubits));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (gate.qubits[j] == q) {
                raise(ErrorCode::InvalidCircuit,
                      fmt::format("gate '{}' repeats qubit {}", gate.name(), q));
            }
        }
    }
    if (gate.kind == GateKind::Measure) {
        if (gate.clbit < 0 || gate.clbit >= n_clbits) {
            raise(ErrorCode::IndexOutOfRange,
                  fmt::format("clbit index {} out of range for {} clbit(s)", gate.clbit, n_clbits));
        }
    } else if (gate.clbit != -1) {
        raise(ErrorCode::InvalidCircuit, fmt::format("gate '{}' cannot write a clbit", gate.name()));
    }
}

QuantumCircuit::QuantumCircuit(int n_qubits, int n_clbits)
    : n_qubits_(n_qubits), n_clbits_(n_clbits) {
    if (n_qubits <= 0) {
        raise(ErrorCode::InvalidCircuit, "a circuit needs at least one qubit");
    }
    if (n_clbits < 0) {
        raise(ErrorCode::InvalidCircuit, "negative clbit count");
    }
    measured_.assign(static_cast<std::size_t>(n_qubits), 0);
    written_.assign(static_cast<std::size_t>(n_clbits), 0);
}

QuantumCircuit& QuantumCircuit::append(Gate gate) {
    check_gate(gate, n_qubits_, n_clbits_);
    if (gate.kind != GateKind::Barrier) {
        for (int q : gate.qubits) {
            if (measured_[static_cast<std::size_t>(q)]) {
                raise(ErrorCode::InvalidCircuit,
                      fmt::format("qubit {} is used after it was measured", q));
            }
        }
    }
    if (gate.kind == GateKind::Measure) {
        auto& w = written_[static_cast<std::size_t>(gate.clbit)];
        if (w) {
            raise(ErrorCode::InvalidCircuit, fmt::format("clbit {} is written twice", gate.clbit));
        }
        w = 1;
        measured_[static_cast<std::size_t>(gate.qubits[0])] = 1;
    }
    gates_.push_back(std::move(gate));
    return *this;
}

bool QuantumCircuit::has_measurements() const noexcept {
    return std::any_of(gates_.begin(), gates_.end(),
                       [](const Gate& g) { return g.kind == GateKind::Measure; });
}

QuantumCircuit QuantumCircuit::without_measurements() const {
    QuantumCircuit out(n_qubits_, n_clbits_);
    for (const auto& g : gates_) {
        if (g.kind != GateKind::Measure) {
            out.gates_.push_back(g);
        }
    }
    return out;
}

void QuantumCircuit::validate() const {
    QuantumCircuit copy(n_qubits_, n_clbits_);
    for (const auto& g : gates_) {
        copy.append(g);
    }
}

CircuitMetrics circuit_metrics(const QuantumCircuit& circuit) {
    CircuitMetrics m;
    std::vector<std::size_t> qlevel(static_cast<std::size_t>(circuit.n_qubits()), 0);
    std::vector<std::size_t> clevel(static_cast<std::size_t>(circuit.n_clbits()), 0);
    for (const auto& g : circuit.gates()) {
        std::size_t level = 0;
        for (int q : g.qubits) {
            level = std::max(level, qlevel[static_cast<std::size_t>(q)]);
        }
        if (g.kind == GateKind::Barrier) {
            // synchronizes its wires without adding a layer
            for (int q : g.qubits) {
                qlevel[static_cast<std::size_t>(q)] = level;
            }
            continue;
        }
        if (g.clbit >= 0) {
            level = std::max(level, clevel[static_cast<std::size_t>(g.clbit)]);
        }
        ++level;
        for (int q : g.qubits) {
            qlevel[static_cast<std::size_t>(q)] = level;
        }
        if (g.clbit >= 0) {
            clevel[static_cast<std::size_t>(g.clbit)] = level;
        }
        ++m.gate_count;
        if (is_two_qubit(g.kind)) {
            ++m.two_qubit_count;
        }
        m.depth = std::max(m.depth, level);
    }
    return m;
}

} // namespace qstack
