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

#include <cstring>
#include <numbers>
#include <random>

#include "qstack/errors.hpp"
#include "qstack/qasm.hpp"
#include "support/oracles.hpp"

using namespace qstack;

namespace {

constexpr const char* kHadamardQasm =
    "OPENQASM 3;\n"
    "include \"stdgates.inc\";\n"
    "qubit[1] q;\n"
    "bit[1] c;\n"
    "h q[0];\n"
    "c[0] = measure q[0];\n";

ErrorCode parse_error(const std::string& text) {
    try {
        parse_qasm(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a parse error for: " << text;
    return ErrorCode::Internal;
}

} // namespace

TEST(ParseQasm, SamplingProgram) {
    const auto c = parse_qasm(
        R"(OPENQASM 3; include "stdgates.inc"; qubit[1] q; bit[1] c; h q[0]; c[0] = measure q[0];)");
    EXPECT_EQ(c.n_qubits(), 1);
    EXPECT_EQ(c.n_clbits(), 1);
    ASSERT_EQ(c.gates().size(), 2u);
    EXPECT_EQ(c.gates()[0], Gate::one(GateKind::H, 0));
    EXPECT_EQ(c.gates()[1], Gate::measure(0, 0));
}

TEST(ParseQasm, DeclarationsOnly) {
    const auto c = parse_qasm("OPENQASM 3; qubit[2] q;");
    EXPECT_EQ(c.n_qubits(), 2);
    EXPECT_EQ(c.n_clbits(), 0);
    EXPECT_TRUE(c.empty());
}

TEST(ParseQasm, OperandOutOfRange) {
    try {
        parse_qasm("OPENQASM 3;\nqubit[2] q;\nh q[5];\n");
        FAIL();
    } catch (const QasmError& e) {
        EXPECT_EQ(e.code(), ErrorCode::IndexOutOfRange);
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(ParseQasm, SyntaxErrorsCarryPosition) {
    try {
        parse_qasm("OPENQASM 3;\nqubit[2] q;\nh q[0]\ncx q[0], q[1];");
        FAIL();
    } catch (const QasmError& e) {
        EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
        EXPECT_EQ(e.line(), 4);
        EXPECT_EQ(e.column(), 1);
    }
}

TEST(ParseQasm, UnsupportedConstructs) {
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; bit[1] c; if (c[0]) x q[0];"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 3; gate foo a { h a; } qubit[1] q;"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; u3(0,0,0) q[0];"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; qubit[1] r;"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 2.0; qreg q[1];"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[2] q; h q;"), ErrorCode::UnsupportedConstruct);
    EXPECT_EQ(parse_error("OPENQASM 3; include \"qelib1.inc\"; qubit[1] q;"), ErrorCode::UnsupportedConstruct);
}

TEST(ParseQasm, RejectsGateAfterMeasure) {
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; bit[1] c; c[0] = measure q[0]; x q[0];"),
              ErrorCode::InvalidCircuit);
}

TEST(ParseQasm, RejectsMissingRegisterAndBadArity) {
    EXPECT_EQ(parse_error("OPENQASM 3;"), ErrorCode::InvalidCircuit);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[2] q; cx q[0];"), ErrorCode::InvalidCircuit);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[2] q; cx q[0], q[0];"), ErrorCode::InvalidCircuit);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; rz q[0];"), ErrorCode::InvalidCircuit);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; h(0.5) q[0];"), ErrorCode::InvalidCircuit);
    EXPECT_EQ(parse_error("OPENQASM 3; qubit[1] q; rz(1/0) q[0];"), ErrorCode::InvalidCircuit);
}

TEST(ParseQasm, AngleExpressionsAndAlternateSyntax) {
    const auto c = parse_qasm(
        "OPENQASM 3.0;\n"
        "// comment\n"
        "qubit[2] q; /* block */ bit[2] c;\n"
        "rz(pi/2) q[0];\n"
        "rx(-2*(pi - 1)) q[1];\n"
        "ry(1.5e-3) q[1];\n"
        "barrier q;\n"
        "measure q[1] -> c[0];\n");
    ASSERT_EQ(c.gates().size(), 5u);
    EXPECT_DOUBLE_EQ(c.gates()[0].params[0], std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(c.gates()[1].params[0], -2 * (std::numbers::pi - 1));
    EXPECT_DOUBLE_EQ(c.gates()[2].params[0], 1.5e-3);
    EXPECT_EQ(c.gates()[3], Gate::barrier({0, 1}));
    EXPECT_EQ(c.gates()[4], Gate::measure(1, 0));
}

TEST(EmitQasm, HadamardCanonical) {
    QuantumCircuit c(1, 1);
    c.h(0).measure(0, 0);
    EXPECT_EQ(emit_qasm(c), kHadamardQasm);
    EXPECT_EQ(parse_qasm(emit_qasm(c)), c);
}

TEST(EmitQasm, EmptyCircuitHasNoBitRegister) {
    EXPECT_EQ(emit_qasm(QuantumCircuit(2)), "OPENQASM 3;\ninclude \"stdgates.inc\";\nqubit[2] q;\n");
}

TEST(EmitQasm, AnglesSurviveBitExactly) {
    QuantumCircuit c(1);
    c.rz(0, 1.5707963267948966);
    const auto text = emit_qasm(c);
    EXPECT_NE(text.find("rz(1.5707963267948966) q[0];"), std::string::npos);
    const double back = parse_qasm(text).gates()[0].params[0];
    EXPECT_EQ(std::memcmp(&back, &c.gates()[0].params[0], sizeof(double)), 0);
}

TEST(EmitQasm, RoundTripProperty) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const auto c = oracle::random_circuit(rng, n, static_cast<int>(rng() % 25), rng() % 2 == 0, true);
        ASSERT_EQ(parse_qasm(emit_qasm(c)), c) << emit_qasm(c);
    }
}

TEST(Circuit, AppendEnforcesInvariants) {
    QuantumCircuit c(2, 1);
    EXPECT_THROW(c.append(Gate::one(GateKind::H, 2)), Error);
    EXPECT_THROW(c.append(Gate::measure(0, 1)), Error);
    c.measure(0, 0);
    EXPECT_THROW(c.measure(1, 0), Error); // clbit written twice
    EXPECT_THROW(c.h(0), Error);          // gate after measure
    EXPECT_NO_THROW(c.h(1));
    EXPECT_NO_THROW(c.append(Gate::barrier({0, 1})));
    EXPECT_THROW(QuantumCircuit(0), Error);
}

TEST(CircuitMetrics, Examples) {
    QuantumCircuit a(1, 1);
    a.h(0).measure(0, 0);
    EXPECT_EQ(circuit_metrics(a), (CircuitMetrics{2, 0, 2}));

    EXPECT_EQ(circuit_metrics(QuantumCircuit(3)), (CircuitMetrics{0, 0, 0}));

    QuantumCircuit b(2);
    b.h(0).x(1).cx(0, 1);
    EXPECT_EQ(circuit_metrics(b), (CircuitMetrics{3, 1, 2}));
}

TEST(CircuitMetrics, BarrierSynchronizesWithoutDepth) {
    QuantumCircuit c(2);
    c.h(0).h(0).append(Gate::barrier({0, 1}));
    c.x(1);
    // x on q1 waits for the barrier, so it lands at level 3.
    EXPECT_EQ(circuit_metrics(c), (CircuitMetrics{3, 0, 3}));
}

TEST(CircuitMetrics, BoundsProperty) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = oracle::random_circuit(rng, 1 + static_cast<int>(rng() % 5), static_cast<int>(rng() % 30),
                                               true, true);
        const auto m = circuit_metrics(c);
        EXPECT_LE(m.depth, m.gate_count);
        EXPECT_LE(m.two_qubit_count, m.gate_count);
    }
}
