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

#include "qstack/multiprog.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

std::optional<std::vector<int>> grow_region(const Topology& topo, const std::vector<char>& used, int seed,
                                            int size) {
    std::vector<char> seen(used.size(), 0);
    std::vector<int> region;
    std::deque<int> frontier{seed};
    seen[static_cast<std::size_t>(seed)] = 1;
    while (!frontier.empty() && static_cast<int>(region.size()) < size) {
        const int q = frontier.front();
        frontier.pop_front();
        region.push_back(q);
        for (int n : topo.neighbors(q)) {
            if (!seen[static_cast<std::size_t>(n)] && !used[static_cast<std::size_t>(n)]) {
                seen[static_cast<std::size_t>(n)] = 1;
                frontier.push_back(n);
            }
        }
    }
    if (static_cast<int>(region.size()) < size) {
        return std::nullopt;
    }
    return region;
}

} // namespace

std::vector<int> CombinePlan::regions() const {
    std::vector<int> out(static_cast<std::size_t>(combined_n_qubits), -1);
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        for (int p : circuits[i].qubit_map) {
            out[static_cast<std::size_t>(p)] = static_cast<int>(i);
        }
    }
    int next = static_cast<int>(circuits.size());
    for (auto& r : out) {
        if (r < 0) {
            r = next++;
        }
    }
    return out;
}

nlohmann::json CombinePlan::to_json() const {
    nlohmann::json subs = nlohmann::json::array();
    for (const auto& s : circuits) {
        subs.push_back({{"qubit_map", s.qubit_map}, {"clbit_map", s.clbit_map}});
    }
    return {{"circuits", subs}, {"combined_n_qubits", combined_n_qubits}, {"combined_n_clbits", combined_n_clbits}};
}

CombinePlan CombinePlan::from_json(const nlohmann::json& j) {
    CombinePlan p;
    for (const auto& s : j.at("circuits")) {
        p.circuits.push_back({s.at("qubit_map").get<std::vector<int>>(), s.at("clbit_map").get<std::vector<int>>()});
    }
    p.combined_n_qubits = j.at("combined_n_qubits").get<int>();
    p.combined_n_clbits = j.at("combined_n_clbits").get<int>();
    return p;
}

std::pair<QuantumCircuit, CombinePlan> combine(const std::vector<QuantumCircuit>& circuits,
                                               const DeviceSpec& device) {
    if (circuits.empty()) {
        raise(ErrorCode::InvalidArgument, "multi-programming needs at least one circuit");
    }
    int total_qubits = 0;
    int total_clbits = 0;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        if (circuits[i].empty()) {
            raise(ErrorCode::InvalidArgument, fmt::format("circuit {} has no gates", i));
        }
        total_qubits += circuits[i].n_qubits();
        total_clbits += circuits[i].n_clbits();
    }
    if (total_qubits > device.n_qubits) {
        raise(ErrorCode::InsufficientQubits, fmt::format("circuits need {} qubits, device '{}' has {}", total_qubits,
                                                         device.id, device.n_qubits));
    }

    std::vector<std::size_t> order(circuits.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return circuits[a].n_qubits() > circuits[b].n_qubits();
    });

    CombinePlan plan;
    plan.circuits.resize(circuits.size());
    plan.combined_n_qubits = device.n_qubits;
    plan.combined_n_clbits = total_clbits;

    std::vector<char> used(static_cast<std::size_t>(device.n_qubits), 0);
    for (std::size_t idx : order) {
        const int need = circuits[idx].n_qubits();
        std::optional<std::vector<int>> region;
        for (int seed = 0; seed < device.n_qubits && !region; ++seed) {
            if (!used[static_cast<std::size_t>(seed)]) {
                region = grow_region(device.topology, used, seed, need);
            }
        }
        if (!region) {
            raise(ErrorCode::NoConnectedRegion,
                  fmt::format("no connected region of {} free qubits for circuit {}", need, idx));
        }
        for (int p : *region) {
            used[static_cast<std::size_t>(p)] = 1;
        }
        plan.circuits[idx].qubit_map = std::move(*region);
    }

    int clbit_offset = 0;
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        auto& cm = plan.circuits[i].clbit_map;
        for (int c = 0; c < circuits[i].n_clbits(); ++c) {
            cm.push_back(clbit_offset + c);
        }
        clbit_offset += circuits[i].n_clbits();
    }

    QuantumCircuit combined(plan.combined_n_qubits, plan.combined_n_clbits);
    for (std::size_t i = 0; i < circuits.size(); ++i) {
        const auto& map = plan.circuits[i];
        for (Gate g : circuits[i].gates()) {
            for (auto& q : g.qubits) {
                q = map.qubit_map[static_cast<std::size_t>(q)];
            }
            if (g.clbit >= 0) {
                g.clbit = map.clbit_map[static_cast<std::size_t>(g.clbit)];
            }
            combined.append(std::move(g));
        }
    }
    return {std::move(combined), std::move(plan)};
}

std::vector<Counts> split_counts(const Counts& combined, const CombinePlan& plan) {
    if (combined.n_bits() != plan.combined_n_clbits) {
        raise(ErrorCode::KeyLengthMismatch, fmt::format("combined keys have {} bits, plan expects {}",
                                                        combined.n_bits(), plan.combined_n_clbits));
    }
    std::vector<Counts> out;
    out.reserve(plan.circuits.size());
    for (const auto& sub : plan.circuits) {
        const auto width = sub.clbit_map.size();
        Counts c(static_cast<int>(width));
        std::string key(width, '0');
        for (const auto& [k, v] : combined.bins()) {
            for (std::size_t j = 0; j < width; ++j) {
                key[width - 1 - j] = clbit_char(k, sub.clbit_map[j]);
            }
            c.add(key, v);
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace qstack
