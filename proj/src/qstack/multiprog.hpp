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

#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/circuit.hpp"
#include "qstack/counts.hpp"
#include "qstack/device.hpp"

namespace qstack {

struct SubcircuitMap {
    std::vector<int> qubit_map; // sub-circuit qubit -> device qubit
    std::vector<int> clbit_map; // sub-circuit clbit -> combined clbit
};

/// Placement of each sub-circuit on a disjoint connected device region.
struct CombinePlan {
    std::vector<SubcircuitMap> circuits;
    int combined_n_qubits = 0;
    int combined_n_clbits = 0;

    /// Device qubit -> owning sub-circuit index; unused qubits get ids past the last circuit
    /// so that routing treats each of them as its own region.
    [[nodiscard]] std::vector<int> regions() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static CombinePlan from_json(const nlohmann::json& j);
};

/// Allocates regions greedily in descending qubit count (ties by array order), each grown
/// by BFS from the lowest-index free qubit that admits a connected region of the needed
/// size. Clbits are packed in array order.
/// Throws InsufficientQubits, NoConnectedRegion, InvalidArgument (empty list or circuit).
std::pair<QuantumCircuit, CombinePlan> combine(const std::vector<QuantumCircuit>& circuits,
                                               const DeviceSpec& device);

/// Projects each combined key onto every sub-circuit's clbits. Throws KeyLengthMismatch.
std::vector<Counts> split_counts(const Counts& combined, const CombinePlan& plan);

} // namespace qstack
