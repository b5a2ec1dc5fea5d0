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

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/circuit.hpp"
#include "qstack/device.hpp"

namespace qstack {

struct TranspileOptions {
    /// 0 disables the peephole pass.
    int optimization_level = 1;
    /// Virtual -> physical start placement; identity when absent. May be shorter than the
    /// device, in which case unused physical qubits fill the tail in ascending order.
    std::optional<std::vector<int>> initial_layout;
    /// Physical qubit -> region id. Routing paths never leave the region of their endpoints.
    std::optional<std::vector<int>> regions;
    /// Plugin-specific settings, passed through untouched.
    nlohmann::json extra = nlohmann::json::object();

    [[nodiscard]] nlohmann::json to_json() const;
    static TranspileOptions from_json(const nlohmann::json& j);
};

/// `initial_layout` / `final_layout` are full virtual -> physical permutations over the
/// device's qubits; virtual qubits beyond the input circuit are ancillas.
struct TranspileResult {
    QuantumCircuit circuit;
    std::vector<int> initial_layout;
    std::vector<int> final_layout;
    CircuitMetrics metrics;
    std::string transpiler_name;
};

using Transpiler =
    std::function<TranspileResult(const QuantumCircuit&, const DeviceSpec&, const TranspileOptions&)>;

enum class Objective { TwoQubitCount, Depth, GateCount };

std::string_view to_string(Objective o) noexcept;
Objective objective_from_string(std::string_view s);

/// Strict weak order: primary metric first, then the remaining two in the fixed
/// order two_qubit_count, depth, gate_count.
bool better(const CircuitMetrics& a, const CircuitMetrics& b, Objective objective);

struct TranspileFailure {
    std::string transpiler_name;
    std::string message;
};

struct CompareOutcome {
    std::vector<TranspileResult> results; // ascending by objective; front() is the pick
    std::vector<TranspileFailure> failures;
};

class TranspilerRegistry {
public:
    /// Starts with "default" and "identity" registered.
    TranspilerRegistry();

    /// Throws DuplicateName.
    void register_transpiler(const std::string& name, Transpiler fn);
    [[nodiscard]] bool contains(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> names() const;

    /// Runs one transpiler and checks its result against the device.
    /// Throws UnknownTranspiler, CircuitTooLarge, NonConformantCircuit, or whatever the pass raises.
    TranspileResult transpile(const QuantumCircuit& circuit, const DeviceSpec& device, const std::string& name,
                              const TranspileOptions& options = {}) const;

    /// Runs every named transpiler concurrently; failures are collected, not thrown,
    /// unless all of them fail (AllTranspilersFailed).
    CompareOutcome compare(const QuantumCircuit& circuit, const DeviceSpec& device,
                           const std::vector<std::string>& names, Objective objective = Objective::TwoQubitCount,
                           const TranspileOptions& options = {}) const;

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, Transpiler> table_;
};

// Individual passes of the default pipeline, exposed for testing.

/// Rewrites every gate into the device basis (plus measure/barrier). Throws UnsupportedBasis.
QuantumCircuit decompose_to_basis(const QuantumCircuit& circuit, const std::set<GateKind>& basis);

/// Peephole: cancels adjacent identical cx/cz pairs and x pairs, merges runs of rz on a
/// wire, and drops rz whose angle is 0 mod 2pi (within 1e-12). Iterates to a fixpoint.
QuantumCircuit optimize_peephole(const QuantumCircuit& circuit);

TranspileResult default_transpile(const QuantumCircuit& circuit, const DeviceSpec& device,
                                  const TranspileOptions& options);
TranspileResult identity_transpile(const QuantumCircuit& circuit, const DeviceSpec& device,
                                   const TranspileOptions& options);

/// Throws NonConformantCircuit if the result breaks a device or layout invariant.
void check_conformance(const TranspileResult& result, const DeviceSpec& device);

nlohmann::json metrics_to_json(const CircuitMetrics& m);

/// Transpile-service request/response handling:
/// {qasm, device_json, transpiler_name, options} -> {qasm, initial_layout, final_layout, metrics, transpiler_name}.
/// Errors propagate as exceptions.
nlohmann::json handle_transpile_request(const TranspilerRegistry& registry, const nlohmann::json& request);

/// Adapter that forwards to a remote transpile service at `base_url` (POST /transpile).
Transpiler remote_transpiler(std::string base_url, std::string api_key, std::string remote_name = "default");

} // namespace qstack
