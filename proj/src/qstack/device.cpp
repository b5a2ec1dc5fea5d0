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

#include "qstack/device.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

Topology::Topology(int n_qubits, std::vector<std::pair<int, int>> edges)
    : n_qubits_(n_qubits), adj_(static_cast<std::size_t>(std::max(n_qubits, 0))) {
    if (n_qubits <= 0) {
        raise(ErrorCode::InvalidDevice, "topology needs at least one qubit");
    }
    for (auto& [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= n_qubits || b >= n_qubits) {
            raise(ErrorCode::InvalidDevice, fmt::format("invalid edge ({}, {}) for {} qubits", a, b, n_qubits));
        }
        if (a > b) {
            std::swap(a, b);
        }
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        raise(ErrorCode::InvalidDevice, "duplicate edge in topology");
    }
    for (const auto& [a, b] : edges) {
        adj_[static_cast<std::size_t>(a)].push_back(b);
        adj_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& n : adj_) {
        std::sort(n.begin(), n.end());
    }
    edges_ = std::move(edges);
}

Topology Topology::line(int n_qubits) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n_qubits; ++i) {
        e.emplace_back(i, i + 1);
    }
    return Topology(n_qubits, std::move(e));
}

Topology Topology::all_to_all(int n_qubits) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n_qubits; ++i) {
        for (int j = i + 1; j < n_qubits; ++j) {
            e.emplace_back(i, j);
        }
    }
    return Topology(n_qubits, std::move(e));
}

bool Topology::adjacent(int a, int b) const {
    if (a < 0 || a >= n_qubits_) {
        return false;
    }
    const auto& n = adj_[static_cast<std::size_t>(a)];
    return std::binary_search(n.begin(), n.end(), b);
}

bool Topology::connected() const {
    if (n_qubits_ <= 1) {
        return true;
    }
    std::vector<char> seen(static_cast<std::size_t>(n_qubits_), 0);
    std::deque<int> frontier{0};
    seen[0] = 1;
    int visited = 1;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        for (int n : neighbors(q)) {
            if (!seen[static_cast<std::size_t>(n)]) {
                seen[static_cast<std::size_t>(n)] = 1;
                ++visited;
                frontier.push_back(n);
            }
        }
    }
    return visited == n_qubits_;
}

std::string_view to_string(DeviceStatus s) noexcept {
    return s == DeviceStatus::Available ? "available" : "unavailable";
}

DeviceStatus device_status_from_string(std::string_view s) {
    if (s == "available") {
        return DeviceStatus::Available;
    }
    if (s == "unavailable") {
        return DeviceStatus::Unavailable;
    }
    raise(ErrorCode::InvalidDevice, fmt::format("unknown device status '{}'", s));
}

void DeviceSpec::validate() const {
    if (id.empty()) {
        raise(ErrorCode::InvalidDevice, "device id must be non-empty");
    }
    if (n_qubits <= 0) {
        raise(ErrorCode::InvalidDevice, "device needs at least one qubit");
    }
    if (topology.n_qubits() != n_qubits) {
        raise(ErrorCode::InvalidDevice,
              fmt::format("topology has {} qubits, device has {}", topology.n_qubits(), n_qubits));
    }
    if (static_cast<int>(readout_errors.size()) != n_qubits) {
        raise(ErrorCode::InvalidDevice,
              fmt::format("expected {} readout error entries, got {}", n_qubits, readout_errors.size()));
    }
    for (std::size_t q = 0; q < readout_errors.size(); ++q) {
        const auto& r = readout_errors[q];
        if (!(r.eps01 >= 0.0 && r.eps01 <= 1.0 && r.eps10 >= 0.0 && r.eps10 <= 1.0)) {
            raise(ErrorCode::InvalidDevice, fmt::format("qubit {} readout error outside [0, 1]", q));
        }
        if (!(r.eps01 + r.eps10 < 1.0)) {
            raise(ErrorCode::InvalidDevice,
                  fmt::format("qubit {} has eps01 + eps10 >= 1 (confusion matrix not invertible)", q));
        }
    }
    for (auto g : basis_gates) {
        if (g == GateKind::Measure || g == GateKind::Barrier) {
            raise(ErrorCode::InvalidDevice, fmt::format("'{}' is not a basis gate", gate_name(g)));
        }
    }
}

DeviceSpec DeviceSpec::simple(std::string id, int n_qubits) {
    DeviceSpec d;
    d.id = std::move(id);
    d.n_qubits = n_qubits;
    d.topology = Topology::line(n_qubits);
    d.basis_gates = {GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX};
    d.readout_errors.assign(static_cast<std::size_t>(n_qubits), ReadoutError{});
    return d;
}

nlohmann::json device_to_json(const DeviceSpec& d) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : d.topology.edges()) {
        edges.push_back({a, b});
    }
    nlohmann::json basis = nlohmann::json::array();
    for (auto g : d.basis_gates) {
        basis.push_back(std::string(gate_name(g)));
    }
    nlohmann::json ro = nlohmann::json::array();
    for (const auto& r : d.readout_errors) {
        ro.push_back({{"eps01", r.eps01}, {"eps10", r.eps10}});
    }
    return {
        {"id", d.id},
        {"n_qubits", d.n_qubits},
        {"edges", std::move(edges)},
        {"basis_gates", std::move(basis)},
        {"readout_errors", std::move(ro)},
        {"status", std::string(to_string(d.status))},
        {"calibrated_at", d.calibrated_at},
    };
}

DeviceSpec device_from_json(const nlohmann::json& j) {
    try {
        DeviceSpec d;
        d.id = j.at("id").get<std::string>();
        d.n_qubits = j.at("n_qubits").get<int>();
        std::vector<std::pair<int, int>> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                raise(ErrorCode::InvalidDevice, "edges must be [a, b] pairs");
            }
            edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        d.topology = Topology(d.n_qubits, std::move(edges));
        if (j.contains("basis_gates")) {
            for (const auto& g : j.at("basis_gates")) {
                const auto name = g.get<std::string>();
                const auto kind = gate_from_name(name);
                if (!kind) {
                    raise(ErrorCode::InvalidDevice, fmt::format("unknown basis gate '{}'", name));
                }
                d.basis_gates.insert(*kind);
            }
        } else {
            d.basis_gates = {GateKind::RZ, GateKind::SX, GateKind::X, GateKind::CX};
        }
        if (j.contains("readout_errors")) {
            for (const auto& r : j.at("readout_errors")) {
                d.readout_errors.push_back({r.at("eps01").get<double>(), r.at("eps10").get<double>()});
            }
        } else {
            d.readout_errors.assign(static_cast<std::size_t>(std::max(d.n_qubits, 0)), ReadoutError{});
        }
        if (j.contains("status")) {
            d.status = device_status_from_string(j.at("status").get<std::string>());
        }
        if (j.contains("calibrated_at") && j.at("calibrated_at").is_string()) {
            d.calibrated_at = j.at("calibrated_at").get<std::string>();
        }
        d.validate();
        return d;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidDevice, fmt::format("malformed device JSON: {}", e.what()));
    }
}

} // namespace qstack
