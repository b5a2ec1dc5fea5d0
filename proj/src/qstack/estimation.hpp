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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/circuit.hpp"
#include "qstack/counts.hpp"
#include "qstack/device.hpp"
#include "qstack/mitigation.hpp"
#include "qstack/observable.hpp"
#include "qstack/transpiler.hpp"

namespace qstack {

struct MeasurementGroup {
    PauliString basis; // non-identity letters only
    std::vector<std::pair<PauliString, double>> terms;
};

struct Grouping {
    std::vector<MeasurementGroup> groups;
    double identity_constant = 0.0;
};

/// Greedy qubit-wise commuting grouping: terms in descending |coefficient| order (ties by
/// term order) join the first compatible group, else open a new one.
Grouping group_terms(const Observable& observable);

/// Basis change (X: h, Y: sdg then h) and measures of the basis qubits in ascending order.
/// Throws BaseCircuitHasMeasurements, InvalidArgument for an empty basis.
QuantumCircuit measurement_circuit(const QuantumCircuit& base, const MeasurementGroup& group);

/// Qubit -> clbit used by measurement_circuit.
std::map<int, int> clbit_assignment(const MeasurementGroup& group);

/// Parity expectation over normalized weights. Throws UnmeasuredSupportQubit.
double expectation_from_counts(const Counts& counts, const PauliString& pauli, const std::map<int, int>& clbits);
double expectation_from_quasi(const QuasiDistribution& quasi, const PauliString& pauli,
                              const std::map<int, int>& clbits);

struct EstimateOptions {
    std::string transpiler = "default";
    TranspileOptions transpile;
    bool mitigation = false;
    bool noise = true;
    /// Per device qubit; falls back to the device's configured readout rates.
    std::optional<std::vector<ConfusionMatrix>> calibration;
};

struct GroupResult {
    PauliString basis;
    std::uint64_t shots = 0;
    Counts counts;
    std::optional<QuasiDistribution> mitigated;
    /// Pauli label and coefficient of each term, aligned with term_expectations.
    std::vector<std::pair<std::string, double>> terms;
    std::vector<double> term_expectations;
    std::string transpiled_qasm;
};

struct EstimateResult {
    double value = 0.0;
    double identity_constant = 0.0;
    std::vector<GroupResult> per_group;

    [[nodiscard]] nlohmann::json to_json() const;
};

/// Group i is sampled with seed + i. Throws InsufficientShots, BaseCircuitHasMeasurements,
/// and whatever transpile or sample raise.
EstimateResult estimate(const QuantumCircuit& circuit, const Observable& observable, std::uint64_t shots,
                        const DeviceSpec& device, std::uint64_t seed, const TranspilerRegistry& registry,
                        const EstimateOptions& options = {});

} // namespace qstack
