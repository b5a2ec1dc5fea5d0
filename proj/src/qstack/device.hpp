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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/circuit.hpp"

namespace qstack {

/// Undirected coupling graph.
class Topology {
public:
    Topology() = default;
    Topology(int n_qubits, std::vector<std::pair<int, int>> edges);

    /// Path 0-1-...-(n-1).
    static Topology line(int n_qubits);
    static Topology all_to_all(int n_qubits);

    [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
    /// Normalized (a < b), sorted, unique.
    [[nodiscard]] const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<int>& neighbors(int q) const { return adj_.at(static_cast<std::size_t>(q)); }
    [[nodiscard]] bool adjacent(int a, int b) const;
    [[nodiscard]] bool connected() const;

    friend bool operator==(const Topology& a, const Topology& b) noexcept {
        return a.n_qubits_ == b.n_qubits_ && a.edges_ == b.edges_;
    }

private:
    int n_qubits_ = 0;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> adj_;
};

struct ReadoutError {
    double eps01 = 0.0; // P(read 1 | true 0)
    double eps10 = 0.0; // P(read 0 | true 1)

    friend bool operator==(const ReadoutError&, const ReadoutError&) = default;
};

enum class DeviceStatus { Available, Unavailable };

std::string_view to_string(DeviceStatus s) noexcept;
DeviceStatus device_status_from_string(std::string_view s);

/// Device data model. For the built-in simulator `readout_errors` is also the
/// injected noise model.
struct DeviceSpec {
    std::string id;
    int n_qubits = 0;
    Topology topology;
    std::set<GateKind> basis_gates;
    std::vector<ReadoutError> readout_errors;
    DeviceStatus status = DeviceStatus::Available;
    std::string calibrated_at;

    /// Throws InvalidDevice.
    void validate() const;
    [[nodiscard]] bool supports(GateKind g) const {
        return g == GateKind::Measure || g == GateKind::Barrier || basis_gates.count(g) > 0;
    }

    /// Linear topology, {rz, sx, x, cx}, noiseless.
    static DeviceSpec simple(std::string id, int n_qubits);

    friend bool operator==(const DeviceSpec&, const DeviceSpec&) = default;
};

nlohmann::json device_to_json(const DeviceSpec& d);
/// Validates; throws InvalidDevice for schema or invariant violations.
DeviceSpec device_from_json(const nlohmann::json& j);

} // namespace qstack
