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

// Test-only oracles: random circuit generators and dense linear algebra that do not
// go through the transpiler or mitigation code paths they are used to check.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "qstack/circuit.hpp"
#include "qstack/device.hpp"
#include "qstack/observable.hpp"
#include "qstack/simulator.hpp"

namespace qstack::oracle {

using cplx = std::complex<double>;

inline QuantumCircuit random_circuit(std::mt19937_64& rng, int n_qubits, int n_gates, bool with_measures = false,
                                     bool with_barriers = false) {
    static const GateKind one_q[] = {GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::S,
                                     GateKind::Sdg, GateKind::T, GateKind::Tdg, GateKind::SX, GateKind::RX,
                                     GateKind::RY, GateKind::RZ};
    static const GateKind two_q[] = {GateKind::CX, GateKind::CZ, GateKind::Swap};
    std::uniform_int_distribution<int> qd(0, n_qubits - 1);
    std::uniform_real_distribution<double> ad(-7.0, 7.0);
    QuantumCircuit c(n_qubits, with_measures ? n_qubits : 0);
    for (int i = 0; i < n_gates; ++i) {
        const auto pick = rng() % 100;
        if (with_barriers && pick < 5) {
            std::vector<int> qs;
            for (int q = 0; q < n_qubits; ++q) {
                if (rng() % 2 == 0) qs.push_back(q);
            }
            if (qs.empty()) qs.push_back(qd(rng));
            c.append(Gate::barrier(qs));
        } else if (n_qubits >= 2 && pick < 35) {
            int a = qd(rng);
            int b = qd(rng);
            while (b == a) b = qd(rng);
            c.append(Gate::two(two_q[rng() % 3], a, b));
        } else {
            const GateKind k = one_q[rng() % 12];
            Gate g = Gate::one(k, qd(rng));
            if (gate_param_count(k) == 1) g.params.push_back(ad(rng));
            c.append(g);
        }
    }
    if (with_measures) {
        std::vector<int> clbits(static_cast<std::size_t>(n_qubits));
        std::iota(clbits.begin(), clbits.end(), 0);
        std::shuffle(clbits.begin(), clbits.end(), rng);
        for (int q = 0; q < n_qubits; ++q) {
            if (rng() % 4 != 0) c.measure(q, clbits[static_cast<std::size_t>(q)]);
        }
    }
    return c;
}

/// Random connected graph: a random spanning tree plus a few extra edges.
inline Topology random_connected_topology(std::mt19937_64& rng, int n) {
    std::vector<std::pair<int, int>> edges;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 1; i < n; ++i) {
        const int parent = order[rng() % static_cast<std::uint64_t>(i)];
        edges.emplace_back(std::min(parent, order[i]), std::max(parent, order[i]));
    }
    for (int k = 0; k < n / 2; ++k) {
        int a = static_cast<int>(rng() % n);
        int b = static_cast<int>(rng() % n);
        if (a == b) continue;
        std::pair<int, int> e{std::min(a, b), std::max(a, b)};
        if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
    }
    return Topology(n, edges);
}

/// Dense matrix of the permutation sending virtual wire v to physical wire layout[v].
inline DenseMatrix layout_permutation(const std::vector<int>& layout) {
    const std::size_t n = layout.size();
    const std::size_t dim = std::size_t{1} << n;
    DenseMatrix p{dim, std::vector<cplx>(dim * dim)};
    for (std::size_t x = 0; x < dim; ++x) {
        std::size_t y = 0;
        for (std::size_t v = 0; v < n; ++v) {
            if ((x >> v) & 1U) y |= std::size_t{1} << layout[v];
        }
        p(y, x) = 1.0;
    }
    return p;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c{a.dim, std::vector<cplx>(a.dim * a.dim)};
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t k = 0; k < a.dim; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < a.dim; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix adjoint(const DenseMatrix& a) {
    DenseMatrix c{a.dim, std::vector<cplx>(a.dim * a.dim)};
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t j = 0; j < a.dim; ++j) c(i, j) = std::conj(a(j, i));
    return c;
}

/// U on the low wires, identity on the rest.
inline DenseMatrix embed(const DenseMatrix& u, int n_total) {
    const std::size_t dim = std::size_t{1} << n_total;
    DenseMatrix out{dim, std::vector<cplx>(dim * dim)};
    const std::size_t low = u.dim;
    for (std::size_t hi = 0; hi < dim / low; ++hi)
        for (std::size_t i = 0; i < low; ++i)
            for (std::size_t j = 0; j < low; ++j) out(hi * low + i, hi * low + j) = u(i, j);
    return out;
}

/// |tr(A^dagger B)| / dim: 1 iff equal up to global phase.
inline double phase_fidelity(const DenseMatrix& a, const DenseMatrix& b) {
    cplx tr = 0.0;
    for (std::size_t i = 0; i < a.dim; ++i)
        for (std::size_t k = 0; k < a.dim; ++k) tr += std::conj(a(k, i)) * b(k, i);
    return std::abs(tr) / static_cast<double>(a.dim);
}

/// Fidelity between the transpiled circuit V and P_final (U (x) I) P_initial^dagger.
inline double transpile_fidelity(const QuantumCircuit& input, const QuantumCircuit& output,
                                 const std::vector<int>& initial_layout, const std::vector<int>& final_layout) {
    const int n = output.n_qubits();
    const auto u = embed(unitary(input.without_measurements()), n);
    const auto v = unitary(output.without_measurements());
    const auto expected = matmul(matmul(layout_permutation(final_layout), u), adjoint(layout_permutation(initial_layout)));
    return phase_fidelity(v, expected);
}

/// <psi|P|psi> by direct action of the Pauli string on each basis state.
inline double pauli_expectation(const StateVector& psi, const PauliString& pauli) {
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::size_t j = i;
        cplx phase{1.0, 0.0};
        for (const auto& [q, p] : pauli) {
            const bool bit = (i >> q) & 1U;
            if (p == Pauli::X) {
                j ^= std::size_t{1} << q;
            } else if (p == Pauli::Y) {
                j ^= std::size_t{1} << q;
                phase *= bit ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
            } else if (bit) {
                phase = -phase;
            }
        }
        acc += (std::conj(psi[j]) * phase * psi[i]).real();
    }
    return acc;
}

inline double observable_expectation(const StateVector& psi, const Observable& obs) {
    double acc = 0.0;
    for (const auto& [p, c] : obs.terms()) {
        acc += c * pauli_expectation(psi, p);
    }
    return acc;
}

} // namespace qstack::oracle
