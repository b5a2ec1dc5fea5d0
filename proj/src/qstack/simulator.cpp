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

#include "qstack/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "qstack/errors.hpp"
#include "qstack/rng.hpp"

namespace qstack {

namespace {

using namespace std::complex_literals;

int qubits_of(const StateVector& state) {
    return std::countr_zero(state.size());
}

void apply_1q(StateVector& s, int target, const Matrix2& m) {
    const std::size_t mask = std::size_t{1} << target;
    const std::size_t lo = mask - 1;
    const std::size_t half = s.size() >> 1;
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t i0 = ((i & ~lo) << 1) | (i & lo);
        const std::size_t i1 = i0 | mask;
        const Amplitude a0 = s[i0];
        const Amplitude a1 = s[i1];
        s[i0] = m[0][0] * a0 + m[0][1] * a1;
        s[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
}

void apply_cx(StateVector& s, int control, int target) {
    const std::size_t cm = std::size_t{1} << control;
    const std::size_t tm = std::size_t{1} << target;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((i & cm) && !(i & tm)) {
            std::swap(s[i], s[i | tm]);
        }
    }
}

void apply_cz(StateVector& s, int a, int b) {
    const std::size_t m = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((i & m) == m) {
            s[i] = -s[i];
        }
    }
}

void apply_swap(StateVector& s, int a, int b) {
    const std::size_t am = std::size_t{1} << a;
    const std::size_t bm = std::size_t{1} << b;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((i & am) && !(i & bm)) {
            std::swap(s[i], s[(i ^ am) | bm]);
        }
    }
}

StateVector zero_state(int n) {
    StateVector s(std::size_t{1} << n, Amplitude{0.0, 0.0});
    s[0] = 1.0;
    return s;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
};

// One independently simulated cluster of qubits and the outcome CDF of its measured members.
struct Cluster {
    std::vector<std::pair<int, int>> measures; // (qubit, clbit)
    std::vector<double> cdf;
    std::size_t last_nonzero = 0;
};

std::size_t draw(const Cluster& c, double u) {
    const auto it = std::upper_bound(c.cdf.begin(), c.cdf.end(), u);
    const auto idx = static_cast<std::size_t>(it - c.cdf.begin());
    return std::min(idx, c.last_nonzero);
}

} // namespace

Matrix2 gate_matrix(const Gate& gate) {
    const double r = std::numbers::sqrt2 / 2.0;
    const auto theta = gate.params.empty() ? 0.0 : gate.params[0];
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    switch (gate.kind) {
    case GateKind::H: return {{{r, r}, {r, -r}}};
    case GateKind::X: return {{{0.0, 1.0}, {1.0, 0.0}}};
    case GateKind::Y: return {{{0.0, -1i}, {1i, 0.0}}};
    case GateKind::Z: return {{{1.0, 0.0}, {0.0, -1.0}}};
    case GateKind::S: return {{{1.0, 0.0}, {0.0, 1i}}};
    case GateKind::Sdg: return {{{1.0, 0.0}, {0.0, -1i}}};
    case GateKind::T: return {{{1.0, 0.0}, {0.0, std::polar(1.0, std::numbers::pi / 4.0)}}};
    case GateKind::Tdg: return {{{1.0, 0.0}, {0.0, std::polar(1.0, -std::numbers::pi / 4.0)}}};
    case GateKind::SX: return {{{0.5 + 0.5i, 0.5 - 0.5i}, {0.5 - 0.5i, 0.5 + 0.5i}}};
    case GateKind::RX: return {{{c, -1i * s}, {-1i * s, c}}};
    case GateKind::RY: return {{{c, -s}, {s, c}}};
    case GateKind::RZ: return {{{std::polar(1.0, -theta / 2.0), 0.0}, {0.0, std::polar(1.0, theta / 2.0)}}};
    default: break;
    }
    raise(ErrorCode::InvalidArgument, fmt::format("'{}' is not a single-qubit unitary", gate.name()));
}

void apply_gate(StateVector& state, const Gate& gate) {
    switch (gate.kind) {
    case GateKind::Barrier:
        return;
    case GateKind::Measure:
        raise(ErrorCode::MeasureInStatevectorPath, "measure cannot be applied as a unitary");
    case GateKind::CX:
        apply_cx(state, gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::CZ:
        apply_cz(state, gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::Swap:
        apply_swap(state, gate.qubits[0], gate.qubits[1]);
        return;
    default:
        apply_1q(state, gate.qubits[0], gate_matrix(gate));
    }
}

void apply_circuit(StateVector& state, const QuantumCircuit& circuit) {
    if (qubits_of(state) != circuit.n_qubits() || state.size() != (std::size_t{1} << circuit.n_qubits())) {
        raise(ErrorCode::DimensionMismatch, "state size does not match circuit width");
    }
    for (const auto& g : circuit.gates()) {
        apply_gate(state, g);
    }
}

StateVector statevector(const QuantumCircuit& circuit, int max_qubits) {
    if (circuit.n_qubits() > max_qubits) {
        raise(ErrorCode::TooManyQubits,
              fmt::format("{} qubits exceeds the statevector cap of {}", circuit.n_qubits(), max_qubits));
    }
    if (circuit.has_measurements()) {
        raise(ErrorCode::MeasureInStatevectorPath, "statevector() requires a measurement-free circuit");
    }
    StateVector s = zero_state(circuit.n_qubits());
    apply_circuit(s, circuit);
    return s;
}

DenseMatrix unitary(const QuantumCircuit& circuit) {
    if (circuit.n_qubits() > kMaxUnitaryQubits) {
        raise(ErrorCode::TooManyQubits,
              fmt::format("{} qubits exceeds the unitary cap of {}", circuit.n_qubits(), kMaxUnitaryQubits));
    }
    if (circuit.has_measurements()) {
        raise(ErrorCode::MeasureInStatevectorPath, "unitary() requires a measurement-free circuit");
    }
    const std::size_t dim = std::size_t{1} << circuit.n_qubits();
    DenseMatrix u{dim, std::vector<Amplitude>(dim * dim)};
    for (std::size_t col = 0; col < dim; ++col) {
        StateVector s(dim, Amplitude{0.0, 0.0});
        s[col] = 1.0;
        apply_circuit(s, circuit);
        for (std::size_t row = 0; row < dim; ++row) {
            u(row, col) = s[row];
        }
    }
    return u;
}

std::vector<double> measured_distribution(const QuantumCircuit& circuit, int max_qubits) {
    if (circuit.n_clbits() > 30) {
        raise(ErrorCode::TooManyQubits, "exact distribution limited to 30 clbits");
    }
    const auto state = statevector(circuit.without_measurements(), max_qubits);
    std::vector<std::pair<int, int>> measures;
    for (const auto& g : circuit.gates()) {
        if (g.kind == GateKind::Measure) {
            measures.emplace_back(g.qubits[0], g.clbit);
        }
    }
    std::vector<double> dist(std::size_t{1} << circuit.n_clbits(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        std::size_t key = 0;
        for (const auto& [q, c] : measures) {
            if ((i >> q) & 1U) {
                key |= std::size_t{1} << c;
            }
        }
        dist[key] += std::norm(state[i]);
    }
    return dist;
}

Counts sample(const QuantumCircuit& circuit, std::uint64_t shots, std::uint64_t seed,
              const DeviceSpec& device, const SampleOptions& opts) {
    if (shots == 0) {
        raise(ErrorCode::ZeroShots, "shots must be positive");
    }
    if (circuit.n_qubits() > device.n_qubits) {
        raise(ErrorCode::DeviceMismatch, fmt::format("circuit uses {} qubits but device '{}' has {}",
                                                     circuit.n_qubits(), device.id, device.n_qubits));
    }
    if (opts.noise && static_cast<int>(device.readout_errors.size()) < circuit.n_qubits()) {
        raise(ErrorCode::DeviceMismatch, "device readout calibration does not cover the circuit");
    }

    const int n = circuit.n_qubits();
    UnionFind uf(n);
    std::vector<std::pair<int, int>> measures;
    for (const auto& g : circuit.gates()) {
        if (g.kind == GateKind::Measure) {
            measures.emplace_back(g.qubits[0], g.clbit);
        } else if (g.kind != GateKind::Barrier && g.qubits.size() == 2) {
            uf.unite(g.qubits[0], g.qubits[1]);
        }
    }
    if (measures.empty()) {
        raise(ErrorCode::NoMeasurements, "circuit has no measurements to sample");
    }

    // Clusters ordered by their smallest qubit index.
    std::vector<int> roots;
    for (const auto& [q, c] : measures) {
        const int r = uf.find(q);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
            roots.push_back(r);
        }
    }
    std::sort(roots.begin(), roots.end());

    std::vector<Cluster> clusters;
    clusters.reserve(roots.size());
    for (int root : roots) {
        std::vector<int> local(static_cast<std::size_t>(n), -1);
        int width = 0;
        for (int q = 0; q < n; ++q) {
            if (uf.find(q) == root) {
                local[static_cast<std::size_t>(q)] = width++;
            }
        }
        if (width > opts.max_qubits) {
            raise(ErrorCode::TooManyQubits, fmt::format("an entangled cluster of {} qubits exceeds the cap of {}",
                                                        width, opts.max_qubits));
        }
        StateVector s = zero_state(width);
        for (const auto& g : circuit.gates()) {
            if (g.kind == GateKind::Measure || g.kind == GateKind::Barrier ||
                local[static_cast<std::size_t>(g.qubits[0])] < 0) {
                continue;
            }
            Gate lg = g;
            for (auto& q : lg.qubits) {
                q = local[static_cast<std::size_t>(q)];
            }
            apply_gate(s, lg);
        }
        Cluster cl;
        for (const auto& m : measures) {
            if (uf.find(m.first) == root) {
                cl.measures.push_back(m);
            }
        }
        std::vector<double> dist(std::size_t{1} << cl.measures.size(), 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::size_t key = 0;
            for (std::size_t j = 0; j < cl.measures.size(); ++j) {
                if ((i >> local[static_cast<std::size_t>(cl.measures[j].first)]) & 1U) {
                    key |= std::size_t{1} << j;
                }
            }
            dist[key] += std::norm(s[i]);
        }
        const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
        cl.cdf.resize(dist.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            acc += dist[k] / total;
            cl.cdf[k] = acc;
            if (dist[k] > 0.0) {
                cl.last_nonzero = k;
            }
        }
        clusters.push_back(std::move(cl));
    }

    Rng rng(seed);
    std::unordered_map<std::string, std::uint64_t> hist;
    std::string key(static_cast<std::size_t>(circuit.n_clbits()), '0');
    const auto width = key.size();
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        for (const auto& cl : clusters) {
            const std::size_t outcome = draw(cl, rng.uniform());
            for (std::size_t j = 0; j < cl.measures.size(); ++j) {
                key[width - 1 - static_cast<std::size_t>(cl.measures[j].second)] = ((outcome >> j) & 1U) ? '1' : '0';
            }
        }
        if (opts.noise) {
            for (const auto& [q, c] : measures) {
                const auto& err = device.readout_errors[static_cast<std::size_t>(q)];
                char& bit = key[width - 1 - static_cast<std::size_t>(c)];
                const double u = rng.uniform();
                if (bit == '0' ? u < err.eps01 : u < err.eps10) {
                    bit = bit == '0' ? '1' : '0';
                }
            }
        }
        ++hist[key];
    }
    Counts out(circuit.n_clbits());
    for (const auto& [k, v] : hist) {
        out.add(k, v);
    }
    return out;
}

std::vector<ConfusionMatrix> calibrate_readout(const DeviceSpec& device, std::uint64_t shots,
                                               std::uint64_t seed) {
    if (shots == 0) {
        raise(ErrorCode::ZeroShots, "calibration needs at least one shot");
    }
    const int n = device.n_qubits;
    QuantumCircuit zeros(n, n);
    QuantumCircuit ones(n, n);
    for (int q = 0; q < n; ++q) {
        ones.x(q);
    }
    for (int q = 0; q < n; ++q) {
        zeros.measure(q, q);
        ones.measure(q, q);
    }
    const Counts c0 = sample(zeros, shots, seed, device);
    const Counts c1 = sample(ones, shots, seed + 1, device);

    std::vector<std::uint64_t> flips01(static_cast<std::size_t>(n), 0);
    std::vector<std::uint64_t> flips10(static_cast<std::size_t>(n), 0);
    for (const auto& [k, v] : c0.bins()) {
        for (int q = 0; q < n; ++q) {
            if (clbit_char(k, q) == '1') {
                flips01[static_cast<std::size_t>(q)] += v;
            }
        }
    }
    for (const auto& [k, v] : c1.bins()) {
        for (int q = 0; q < n; ++q) {
            if (clbit_char(k, q) == '0') {
                flips10[static_cast<std::size_t>(q)] += v;
            }
        }
    }
    std::vector<ConfusionMatrix> out;
    out.reserve(static_cast<std::size_t>(n));
    const auto total = static_cast<double>(shots);
    for (std::size_t q = 0; q < static_cast<std::size_t>(n); ++q) {
        out.push_back(ConfusionMatrix::from_rates(static_cast<double>(flips01[q]) / total,
                                                  static_cast<double>(flips10[q]) / total));
    }
    return out;
}

} // namespace qstack
