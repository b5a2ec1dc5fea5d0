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

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "qstack/errors.hpp"
#include "qstack/estimation.hpp"
#include "qstack/simulator.hpp"
#include "support/oracles.hpp"

namespace qstack {
namespace {

Observable xx_yz_operator() {
    return parse_operator({{"X 0 X 1", 1.5}, {"Y 0 Z 1", 1.2}});
}

TEST(GroupTerms, Examples) {
    auto g = group_terms(xx_yz_operator());
    ASSERT_EQ(g.groups.size(), 2u);
    EXPECT_EQ(pauli_label(g.groups[0].basis), "X 0 X 1");
    EXPECT_EQ(pauli_label(g.groups[1].basis), "Y 0 Z 1");
    EXPECT_EQ(g.identity_constant, 0.0);

    g = group_terms(parse_operator({{"Z 0", 1.0}, {"Z 1", 2.0}, {"Z 0 Z 1", 3.0}}));
    ASSERT_EQ(g.groups.size(), 1u);
    EXPECT_EQ(pauli_label(g.groups[0].basis), "Z 0 Z 1");
    EXPECT_EQ(g.groups[0].terms.size(), 3u);
    EXPECT_EQ(g.groups[0].terms[0].second, 3.0);

    g = group_terms(parse_operator({{"", 2.5}}));
    EXPECT_TRUE(g.groups.empty());
    EXPECT_EQ(g.identity_constant, 2.5);
}

TEST(GroupTermsProperty, PartitionAndCompatibility) {
    std::mt19937_64 rng(31);
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<std::string, double>> pairs;
        for (int t = 0; t < 6; ++t) {
            std::string label;
            for (int q = 0; q < 4; ++q) {
                const char l = letters[rng() % 4];
                if (l != 'I') label += fmt::format("{} {} ", l, q);
            }
            pairs.emplace_back(label, static_cast<double>(rng() % 7) - 3.0 + 0.5);
        }
        const Observable obs = parse_operator(pairs);
        const auto g = group_terms(obs);
        std::size_t members = 0;
        for (const auto& group : g.groups) {
            EXPECT_FALSE(group.basis.empty());
            for (const auto& [p, c] : group.terms) {
                ++members;
                EXPECT_EQ(obs.terms().at(p), c);
                for (const auto& [q, l] : p) EXPECT_EQ(group.basis.at(q), l);
            }
        }
        EXPECT_EQ(members, obs.size() - obs.terms().count(PauliString{}));
    }
}

TEST(MeasurementCircuit, Examples) {
    QuantumCircuit base(2, 0);
    base.cx(0, 1);
    MeasurementGroup xx{{{0, Pauli::X}, {1, Pauli::X}}, {}};
    QuantumCircuit expected(2, 2);
    expected.cx(0, 1).h(0).h(1).measure(0, 0).measure(1, 1);
    EXPECT_EQ(measurement_circuit(base, xx), expected);

    MeasurementGroup zz{{{0, Pauli::Z}, {1, Pauli::Z}}, {}};
    QuantumCircuit only_measures(2, 2);
    only_measures.cx(0, 1).measure(0, 0).measure(1, 1);
    EXPECT_EQ(measurement_circuit(base, zz), only_measures);

    MeasurementGroup y{{{1, Pauli::Y}}, {}};
    const auto cy = measurement_circuit(base, y);
    ASSERT_EQ(cy.gates().size(), 4u);
    EXPECT_EQ(cy.gates()[1].kind, GateKind::Sdg);
    EXPECT_EQ(cy.gates()[2].kind, GateKind::H);
    EXPECT_EQ(cy.gates()[3], Gate::measure(1, 0));

    QuantumCircuit measured(1, 1);
    measured.measure(0, 0);
    try {
        measurement_circuit(measured, zz);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BaseCircuitHasMeasurements);
    }
}

TEST(MeasurementCircuit, BasisChangeMatchesPauliOracle) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const QuantumCircuit base = oracle::random_circuit(rng, 3, 15);
        MeasurementGroup g;
        for (int q = 0; q < 3; ++q) {
            const auto r = rng() % 4;
            if (r > 0) g.basis[q] = r == 1 ? Pauli::X : (r == 2 ? Pauli::Y : Pauli::Z);
        }
        if (g.basis.empty()) continue;
        const auto dist = measured_distribution(measurement_circuit(base, g));
        const auto clbits = clbit_assignment(g);
        double from_dist = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            int parity = 0;
            for (const auto& [q, _] : g.basis) parity ^= static_cast<int>((i >> clbits.at(q)) & 1U);
            from_dist += parity ? -dist[i] : dist[i];
        }
        EXPECT_NEAR(from_dist, oracle::pauli_expectation(statevector(base), g.basis), 1e-10);
    }
}

TEST(ExpectationFromCounts, Examples) {
    const PauliString zz{{0, Pauli::Z}, {1, Pauli::Z}};
    const std::map<int, int> clbits{{0, 0}, {1, 1}};
    Counts even(2);
    even.add("00", 500);
    even.add("11", 500);
    EXPECT_EQ(expectation_from_counts(even, zz, clbits), 1.0);
    Counts odd(2);
    odd.add("01", 500);
    odd.add("10", 500);
    EXPECT_EQ(expectation_from_counts(odd, zz, clbits), -1.0);
    try {
        expectation_from_counts(even, zz, {{0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnmeasuredSupportQubit);
    }

    QuantumCircuit base(2, 0);
    base.cx(0, 1);
    MeasurementGroup xx{{{0, Pauli::X}, {1, Pauli::X}}, {}};
    const DeviceSpec dev = DeviceSpec::simple("d", 2);
    const auto counts = sample(measurement_circuit(base, xx), 1000, 5, dev);
    EXPECT_NEAR(expectation_from_counts(counts, xx.basis, clbit_assignment(xx)), 0.0, 0.1);
}

TEST(Estimate, XxYzOnBellPair) {
    QuantumCircuit c(2, 0);
    c.cx(0, 1);
    TranspilerRegistry registry;
    const DeviceSpec dev = DeviceSpec::simple("d", 2);
    EXPECT_NEAR(oracle::observable_expectation(statevector(c), xx_yz_operator()), 0.0, 1e-12);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = estimate(c, xx_yz_operator(), 1000, dev, seed, registry);
        EXPECT_NEAR(r.value, 0.0, 0.2);
        ASSERT_EQ(r.per_group.size(), 2u);
        EXPECT_EQ(r.per_group[0].shots, 500u);
        EXPECT_EQ(r.per_group[0].counts.shots(), 500u);
    }
}

TEST(Estimate, BellZZAndIdentity) {
    QuantumCircuit bell(2, 0);
    bell.h(0).cx(0, 1);
    TranspilerRegistry registry;
    const DeviceSpec dev = DeviceSpec::simple("d", 3);
    for (std::uint64_t shots : {1u, 7u, 1000u}) {
        EXPECT_EQ(estimate(bell, parse_operator({{"Z 0 Z 1", 1.0}}), shots, dev, 3, registry).value, 1.0);
    }
    const auto r = estimate(bell, parse_operator({{"", 2.5}}), 0, dev, 3, registry);
    EXPECT_EQ(r.value, 2.5);
    EXPECT_TRUE(r.per_group.empty());
}

TEST(Estimate, ShotSplitAndErrors) {
    QuantumCircuit c(2, 0);
    c.h(0);
    TranspilerRegistry registry;
    const DeviceSpec dev = DeviceSpec::simple("d", 2);
    const auto obs = parse_operator({{"X 0", 1.0}, {"Y 0", 0.5}, {"Z 0", 0.25}});
    const auto r = estimate(c, obs, 1001, dev, 9, registry);
    ASSERT_EQ(r.per_group.size(), 3u);
    EXPECT_EQ(r.per_group[0].shots, 334u);
    EXPECT_EQ(r.per_group[1].shots, 334u);
    EXPECT_EQ(r.per_group[2].shots, 333u);
    EXPECT_EQ(r.per_group[0].term_expectations.at(0), 1.0);
    const auto j = r.to_json();
    EXPECT_EQ(j["per_group"][0]["basis"], "X 0");
    EXPECT_EQ(j["per_group"][2]["shots"], 333);

    try {
        estimate(c, obs, 2, dev, 9, registry);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InsufficientShots);
    }
    QuantumCircuit m(1, 1);
    m.measure(0, 0);
    try {
        estimate(m, obs, 100, dev, 9, registry);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BaseCircuitHasMeasurements);
    }
}

TEST(Estimate, MitigationOnBell) {
    QuantumCircuit bell(2, 0);
    bell.h(0).cx(0, 1);
    TranspilerRegistry registry;
    DeviceSpec dev = DeviceSpec::simple("noisy", 2);
    dev.readout_errors = {{0.02, 0.05}, {0.02, 0.05}};
    const auto zz = parse_operator({{"Z 0 Z 1", 1.0}});
    EstimateOptions opts;
    opts.mitigation = true;
    opts.calibration = calibrate_readout(dev, 100000, 77);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        EXPECT_NEAR(estimate(bell, zz, 100000, dev, seed, registry).value, 0.8658, 0.01);
        const auto r = estimate(bell, zz, 100000, dev, seed, registry, opts);
        EXPECT_NEAR(r.value, 1.0, 0.02);
        EXPECT_TRUE(r.per_group[0].mitigated.has_value());
    }
}

TEST(EstimateProperty, MatchesStatevectorOracle) {
    std::mt19937_64 rng(33);
    TranspilerRegistry registry;
    const char letters[] = {'X', 'Y', 'Z'};
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const QuantumCircuit c = oracle::random_circuit(rng, n, 12);
        std::vector<std::pair<std::string, double>> pairs;
        std::uniform_real_distribution<double> coeff(-2.0, 2.0);
        for (int t = 0; t < 3; ++t) {
            std::string label;
            for (int q = 0; q < n; ++q) {
                if (rng() % 3 != 0) label += fmt::format("{} {} ", letters[rng() % 3], q);
            }
            pairs.emplace_back(label, coeff(rng));
        }
        const Observable obs = parse_operator(pairs);
        const DeviceSpec dev = DeviceSpec::simple("d", n);
        const std::uint64_t shots = 1000000;
        const auto r = estimate(c, obs, shots, dev, 100 + trial, registry, EstimateOptions{.noise = false});

        const StateVector psi = statevector(c);
        const auto grouping = group_terms(obs);
        double variance = 0.0;
        for (std::size_t gi = 0; gi < grouping.groups.size(); ++gi) {
            // Per-group estimator variance: Var(sum c_k P_k) / shots_g over one shared sample.
            double mean = 0.0;
            double second = 0.0;
            const auto& terms = grouping.groups[gi].terms;
            for (const auto& [p, cp] : terms) mean += cp * oracle::pauli_expectation(psi, p);
            for (const auto& [p, cp] : terms) {
                for (const auto& [q, cq] : terms) {
                    PauliString prod;
                    for (const auto& [k, l] : p) prod[k] = l;
                    for (const auto& [k, l] : q) {
                        if (prod.count(k)) prod.erase(k); else prod[k] = l;
                    }
                    second += cp * cq * oracle::pauli_expectation(psi, prod);
                }
            }
            variance += (second - mean * mean) / static_cast<double>(r.per_group[gi].shots);
        }
        const double exact = oracle::observable_expectation(psi, obs);
        EXPECT_NEAR(r.value, exact, 5 * std::sqrt(variance) + 1e-9) << "trial " << trial;
    }
}

TEST(EstimateProperty, LinearityOnDisjointSupport) {
    std::mt19937_64 rng(34);
    TranspilerRegistry registry;
    for (int trial = 0; trial < 5; ++trial) {
        const QuantumCircuit c = oracle::random_circuit(rng, 2, 10);
        const DeviceSpec dev = DeviceSpec::simple("d", 2);
        const double alpha = 0.7;
        const double beta = -1.3;
        const auto h1 = parse_operator({{"X 0", 1.0}});
        const auto h2 = parse_operator({{"Y 0", 1.0}});
        const auto both = parse_operator({{"X 0", alpha}, {"Y 0", beta}});
        // |beta| > |alpha|, so the Y group runs first with the base seed.
        const auto v1 = estimate(c, h1, 2000, dev, 6, registry).value;
        const auto v2 = estimate(c, h2, 2000, dev, 5, registry).value;
        const auto v = estimate(c, both, 4000, dev, 5, registry).value;
        EXPECT_NEAR(v, alpha * v1 + beta * v2, 1e-12);
    }
}

} // namespace
} // namespace qstack
