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

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qstack/errors.hpp"
#include "qstack/transpiler.hpp"
#include "support/oracles.hpp"

using namespace qstack;
using oracle::transpile_fidelity;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

void expect_conformant(const TranspileResult& r, const DeviceSpec& d) {
    for (const auto& g : r.circuit.gates()) {
        EXPECT_TRUE(d.supports(g.kind)) << g.name();
        if (g.kind != GateKind::Barrier && g.qubits.size() == 2) {
            EXPECT_TRUE(d.topology.adjacent(g.qubits[0], g.qubits[1]));
        }
    }
}

} // namespace

TEST(Registry, BuiltinsAndDuplicates) {
    TranspilerRegistry reg;
    EXPECT_TRUE(reg.contains("default"));
    EXPECT_TRUE(reg.contains("identity"));
    EXPECT_EQ(code_of([&] { reg.register_transpiler("default", default_transpile); }), ErrorCode::DuplicateName);
    reg.register_transpiler("ouqu-tp", default_transpile);
    EXPECT_TRUE(reg.contains("ouqu-tp"));
    EXPECT_EQ(reg.names().size(), 3u);
}

TEST(Transpile, HadamardToBasis) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("d", 1);
    QuantumCircuit c(1);
    c.h(0);
    const auto r = reg.transpile(c, dev, "default");
    ASSERT_EQ(r.circuit.gates().size(), 3u);
    EXPECT_EQ(r.circuit.gates()[0], Gate::rotation(GateKind::RZ, 0, kPi / 2));
    EXPECT_EQ(r.circuit.gates()[1], Gate::one(GateKind::SX, 0));
    EXPECT_EQ(r.circuit.gates()[2], Gate::rotation(GateKind::RZ, 0, kPi / 2));
    EXPECT_NEAR(transpile_fidelity(c, r.circuit, r.initial_layout, r.final_layout), 1.0, 1e-12);
}

TEST(Transpile, IdentityOnConformantCircuit) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("d", 2);
    QuantumCircuit c(2, 2);
    c.rz(0, 0.3).cx(0, 1).measure(0, 0).measure(1, 1);
    const auto r = reg.transpile(c, dev, "identity");
    EXPECT_EQ(r.circuit, c);
    EXPECT_EQ(r.initial_layout, (std::vector<int>{0, 1}));
    EXPECT_EQ(r.final_layout, (std::vector<int>{0, 1}));

    QuantumCircuit h(1);
    h.h(0);
    EXPECT_EQ(code_of([&] { reg.transpile(h, dev, "identity"); }), ErrorCode::NonConformantCircuit);
}

TEST(Transpile, RoutesAcrossLine) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("line3", 3);
    QuantumCircuit c(3);
    c.cx(0, 2);
    const auto r = reg.transpile(c, dev, "default");
    EXPECT_EQ(r.metrics.two_qubit_count, 4u);
    expect_conformant(r, dev);
    EXPECT_EQ(r.final_layout, (std::vector<int>{1, 0, 2}));
    EXPECT_NEAR(transpile_fidelity(c, r.circuit, r.initial_layout, r.final_layout), 1.0, 1e-12);
}

TEST(Transpile, MeasuresFollowTheLayout) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("line3", 3);
    QuantumCircuit c(3, 3);
    c.x(0).cx(0, 2).measure(0, 0).measure(1, 1).measure(2, 2);
    const auto r = reg.transpile(c, dev, "default");
    for (const auto& g : r.circuit.gates()) {
        if (g.kind == GateKind::Measure) {
            EXPECT_EQ(g.qubits[0], r.final_layout[static_cast<std::size_t>(g.clbit)]);
        }
    }
}

TEST(Transpile, Errors) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("d", 2);
    EXPECT_EQ(code_of([&] { reg.transpile(QuantumCircuit(1), dev, "nope"); }), ErrorCode::UnknownTranspiler);
    EXPECT_EQ(code_of([&] { reg.transpile(QuantumCircuit(3), dev, "default"); }), ErrorCode::CircuitTooLarge);

    DeviceSpec split = dev;
    split.n_qubits = 4;
    split.topology = Topology(4, {{0, 1}, {2, 3}});
    split.readout_errors.resize(4);
    QuantumCircuit c(4);
    c.cx(0, 3);
    EXPECT_EQ(code_of([&] { reg.transpile(c, split, "default"); }), ErrorCode::RoutingFailure);
}

TEST(Transpile, RegionsConfineRouting) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("line4", 4);
    QuantumCircuit c(4);
    c.cx(0, 1).cx(2, 3);
    TranspileOptions opts;
    opts.regions = std::vector<int>{0, 0, 1, 1};
    EXPECT_NO_THROW(reg.transpile(c, dev, "default", opts));
    QuantumCircuit cross(4);
    cross.cx(0, 2);
    EXPECT_EQ(code_of([&] { reg.transpile(cross, dev, "default", opts); }), ErrorCode::RoutingFailure);
}

TEST(Transpile, AlternateBasisWithCz) {
    TranspilerRegistry reg;
    auto dev = DeviceSpec::simple("cz", 3);
    dev.basis_gates = {GateKind::RZ, GateKind::SX, GateKind::CZ};
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = oracle::random_circuit(rng, 3, 12);
        const auto r = reg.transpile(c, dev, "default");
        expect_conformant(r, dev);
        EXPECT_NEAR(transpile_fidelity(c, r.circuit, r.initial_layout, r.final_layout), 1.0, 1e-9);
    }
}

TEST(Transpile, UnsupportedBasis) {
    TranspilerRegistry reg;
    auto dev = DeviceSpec::simple("poor", 1);
    dev.basis_gates = {GateKind::RZ};
    QuantumCircuit c(1);
    c.h(0);
    EXPECT_EQ(code_of([&] { reg.transpile(c, dev, "default"); }), ErrorCode::UnsupportedBasis);
}

TEST(Transpile, SemanticPreservationProperty) {
    TranspilerRegistry reg;
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const auto c = oracle::random_circuit(rng, n, static_cast<int>(rng() % 21));
        DeviceSpec dev = DeviceSpec::simple("rand", n);
        dev.topology = oracle::random_connected_topology(rng, n);
        const auto r = reg.transpile(c, dev, "default");
        expect_conformant(r, dev);
        ASSERT_GE(transpile_fidelity(c, r.circuit, r.initial_layout, r.final_layout), 1.0 - 1e-9) << trial;
    }
}

TEST(Peephole, RulesFire) {
    QuantumCircuit c(2);
    c.cx(0, 1).cx(0, 1);      // cancels
    c.rz(0, 0.25).rz(0, 0.5); // merges to 0.75
    c.rz(1, 2 * kPi);         // dropped
    const auto o = optimize_peephole(c);
    ASSERT_EQ(o.gates().size(), 1u);
    EXPECT_DOUBLE_EQ(o.gates()[0].params[0], 0.75);

    QuantumCircuit blocked(2);
    blocked.cx(0, 1).x(1).cx(0, 1);
    EXPECT_EQ(optimize_peephole(blocked).gates().size(), 3u);

    QuantumCircuit cascade(2);
    cascade.rz(0, 0.5).cx(0, 1).cx(0, 1).rz(0, -0.5);
    EXPECT_TRUE(optimize_peephole(cascade).empty());
}

TEST(Peephole, SoundnessProperty) {
    std::mt19937_64 rng(77);
    const GateKind pool[] = {GateKind::RZ, GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX, GateKind::CX};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        QuantumCircuit c(n);
        for (int i = 0; i < 25; ++i) {
            const auto k = pool[rng() % 6];
            const int a = static_cast<int>(rng() % n);
            if (k == GateKind::CX) {
                if (n < 2) continue;
                int b = static_cast<int>(rng() % n);
                while (b == a) b = static_cast<int>(rng() % n);
                c.cx(a, b);
            } else if (k == GateKind::RZ) {
                const double choices[] = {0.0, kPi / 2, -kPi / 2, kPi, 2 * kPi, 0.37};
                c.rz(a, choices[rng() % 6]);
            } else {
                c.append(Gate::one(k, a));
            }
        }
        const auto o = optimize_peephole(c);
        EXPECT_LE(o.gates().size(), c.gates().size());
        const auto ident = [&] {
            std::vector<int> l(static_cast<std::size_t>(n));
            std::iota(l.begin(), l.end(), 0);
            return l;
        }();
        ASSERT_GE(transpile_fidelity(c, o, ident, ident), 1.0 - 1e-9);
    }
}

TEST(Compare, SingleAndRanking) {
    TranspilerRegistry reg;
    const auto dev = DeviceSpec::simple("d", 2);
    QuantumCircuit c(2, 2);
    c.rz(0, 0.3).cx(0, 1).measure(0, 0).measure(1, 1);

    const auto one = reg.compare(c, dev, {"default"});
    EXPECT_EQ(one.results.size(), 1u);

    const auto both = reg.compare(c, dev, {"default", "identity"});
    ASSERT_EQ(both.results.size(), 2u);
    EXPECT_TRUE(both.failures.empty());
    EXPECT_FALSE(better(both.results[1].metrics, both.results[0].metrics, Objective::TwoQubitCount));
    EXPECT_EQ(both.results[0].transpiler_name, "default"); // equal metrics keep request order
}

TEST(Compare, FaultIsolation) {
    TranspilerRegistry reg;
    reg.register_transpiler("broken-plugin-that-throws",
                            [](const QuantumCircuit&, const DeviceSpec&, const TranspileOptions&) -> TranspileResult {
                                throw std::runtime_error("plugin exploded");
                            });
    const auto dev = DeviceSpec::simple("d", 2);
    QuantumCircuit c(2);
    c.h(0).cx(0, 1);
    const auto out = reg.compare(c, dev, {"default", "broken-plugin-that-throws"});
    ASSERT_EQ(out.results.size(), 1u);
    EXPECT_EQ(out.results[0].transpiler_name, "default");
    ASSERT_EQ(out.failures.size(), 1u);
    EXPECT_EQ(out.failures[0].transpiler_name, "broken-plugin-that-throws");
    EXPECT_EQ(code_of([&] { reg.compare(c, dev, {"broken-plugin-that-throws"}); }), ErrorCode::AllTranspilersFailed);
}

TEST(Compare, ObjectiveOrdering) {
    const CircuitMetrics a{10, 1, 9};
    const CircuitMetrics b{5, 2, 3};
    EXPECT_TRUE(better(a, b, Objective::TwoQubitCount));
    EXPECT_TRUE(better(b, a, Objective::Depth));
    EXPECT_TRUE(better(b, a, Objective::GateCount));
}

TEST(TranspileService, RequestResponse) {
    TranspilerRegistry reg;
    const nlohmann::json req{
        {"qasm", "OPENQASM 3; qubit[3] q; cx q[0], q[2];"},
        {"device_json", device_to_json(DeviceSpec::simple("line3", 3))},
        {"transpiler_name", "default"},
        {"options", {{"optimization_level", 1}}},
    };
    const auto resp = handle_transpile_request(reg, req);
    EXPECT_EQ(resp.at("metrics").at("two_qubit_count"), 4);
    EXPECT_EQ(resp.at("final_layout"), nlohmann::json({1, 0, 2}));
    EXPECT_EQ(resp.at("initial_layout"), nlohmann::json({0, 1, 2}));
}
