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

#include "qstack/transpiler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <numbers>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleEps = 1e-12;
constexpr int kMaxRewriteDepth = 8;

void expand(const Gate& g, const std::set<GateKind>& basis, std::vector<Gate>& out, int depth) {
    if (g.kind == GateKind::Measure || g.kind == GateKind::Barrier || basis.count(g.kind) > 0) {
        out.push_back(g);
        return;
    }
    if (depth >= kMaxRewriteDepth) {
        raise(ErrorCode::UnsupportedBasis,
              fmt::format("gate '{}' cannot be expressed in the device basis", g.name()));
    }
    const int q = g.qubits[0];
    auto emit = [&](Gate sub) { expand(sub, basis, out, depth + 1); };
    switch (g.kind) {
    case GateKind::H:
        emit(Gate::rotation(GateKind::RZ, q, kPi / 2));
        emit(Gate::one(GateKind::SX, q));
        emit(Gate::rotation(GateKind::RZ, q, kPi / 2));
        return;
    case GateKind::X:
        emit(Gate::one(GateKind::SX, q));
        emit(Gate::one(GateKind::SX, q));
        return;
    case GateKind::Y:
        // X.Z = -iY
        emit(Gate::one(GateKind::Z, q));
        emit(Gate::one(GateKind::X, q));
        return;
    case GateKind::Z: emit(Gate::rotation(GateKind::RZ, q, kPi)); return;
    case GateKind::S: emit(Gate::rotation(GateKind::RZ, q, kPi / 2)); return;
    case GateKind::Sdg: emit(Gate::rotation(GateKind::RZ, q, -kPi / 2)); return;
    case GateKind::T: emit(Gate::rotation(GateKind::RZ, q, kPi / 4)); return;
    case GateKind::Tdg: emit(Gate::rotation(GateKind::RZ, q, -kPi / 4)); return;
    case GateKind::SX:
        emit(Gate::one(GateKind::H, q));
        emit(Gate::one(GateKind::S, q));
        emit(Gate::one(GateKind::H, q));
        return;
    case GateKind::RX:
        emit(Gate::one(GateKind::H, q));
        emit(Gate::rotation(GateKind::RZ, q, g.params[0]));
        emit(Gate::one(GateKind::H, q));
        return;
    case GateKind::RY:
        emit(Gate::one(GateKind::Sdg, q));
        emit(Gate::rotation(GateKind::RX, q, g.params[0]));
        emit(Gate::one(GateKind::S, q));
        return;
    case GateKind::RZ:
        emit(Gate::one(GateKind::H, q));
        emit(Gate::rotation(GateKind::RX, q, g.params[0]));
        emit(Gate::one(GateKind::H, q));
        return;
    case GateKind::CX: {
        const int t = g.qubits[1];
        emit(Gate::one(GateKind::H, t));
        emit(Gate::two(GateKind::CZ, q, t));
        emit(Gate::one(GateKind::H, t));
        return;
    }
    case GateKind::CZ: {
        const int t = g.qubits[1];
        emit(Gate::one(GateKind::H, t));
        emit(Gate::two(GateKind::CX, q, t));
        emit(Gate::one(GateKind::H, t));
        return;
    }
    case GateKind::Swap: {
        const int b = g.qubits[1];
        emit(Gate::two(GateKind::CX, q, b));
        emit(Gate::two(GateKind::CX, b, q));
        emit(Gate::two(GateKind::CX, q, b));
        return;
    }
    default:
        break;
    }
    raise(ErrorCode::UnsupportedBasis, fmt::format("no rewrite rule for '{}'", g.name()));
}

double wrap_angle(double theta) { return std::remainder(theta, 2.0 * kPi); }

bool is_zero_angle(double theta) { return std::abs(wrap_angle(theta)) < kAngleEps; }

std::vector<int> complete_layout(const std::optional<std::vector<int>>& partial, int n_physical) {
    std::vector<int> layout;
    std::vector<char> used(static_cast<std::size_t>(n_physical), 0);
    if (partial) {
        if (static_cast<int>(partial->size()) > n_physical) {
            raise(ErrorCode::InvalidArgument, "initial_layout is longer than the device");
        }
        for (int p : *partial) {
            if (p < 0 || p >= n_physical || used[static_cast<std::size_t>(p)]) {
                raise(ErrorCode::InvalidArgument, "initial_layout must be injective onto device qubits");
            }
            used[static_cast<std::size_t>(p)] = 1;
            layout.push_back(p);
        }
    }
    for (int p = 0; p < n_physical; ++p) {
        if (!used[static_cast<std::size_t>(p)]) {
            layout.push_back(p);
        }
    }
    return layout;
}

std::vector<int> shortest_path(const Topology& topo, int from, int to, const std::vector<int>* regions) {
    const int region = regions ? (*regions)[static_cast<std::size_t>(from)] : 0;
    if (regions && (*regions)[static_cast<std::size_t>(to)] != region) {
        raise(ErrorCode::RoutingFailure,
              fmt::format("physical qubits {} and {} lie in different regions", from, to));
    }
    std::vector<int> prev(static_cast<std::size_t>(topo.n_qubits()), -2);
    std::deque<int> frontier{from};
    prev[static_cast<std::size_t>(from)] = -1;
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop_front();
        if (u == to) {
            break;
        }
        for (int v : topo.neighbors(u)) {
            if (prev[static_cast<std::size_t>(v)] != -2) {
                continue;
            }
            if (regions && (*regions)[static_cast<std::size_t>(v)] != region) {
                continue;
            }
            prev[static_cast<std::size_t>(v)] = u;
            frontier.push_back(v);
        }
    }
    if (prev[static_cast<std::size_t>(to)] == -2) {
        raise(ErrorCode::RoutingFailure, fmt::format("no path between physical qubits {} and {}", from, to));
    }
    std::vector<int> path;
    for (int v = to; v != -1; v = prev[static_cast<std::size_t>(v)]) {
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

bool is_permutation_of(const std::vector<int>& layout, int n) {
    if (static_cast<int>(layout.size()) != n) {
        return false;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int p : layout) {
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]) {
            return false;
        }
        seen[static_cast<std::size_t>(p)] = 1;
    }
    return true;
}

} // namespace

nlohmann::json TranspileOptions::to_json() const {
    nlohmann::json j{{"optimization_level", optimization_level}};
    if (initial_layout) {
        j["initial_layout"] = *initial_layout;
    }
    if (regions) {
        j["regions"] = *regions;
    }
    if (!extra.empty()) {
        j["extra"] = extra;
    }
    return j;
}

TranspileOptions TranspileOptions::from_json(const nlohmann::json& j) {
    TranspileOptions o;
    if (j.is_null()) {
        return o;
    }
    if (!j.is_object()) {
        raise(ErrorCode::InvalidArgument, "transpiler options must be an object");
    }
    try {
        o.optimization_level = j.value("optimization_level", 1);
        if (j.contains("initial_layout")) {
            o.initial_layout = j.at("initial_layout").get<std::vector<int>>();
        }
        if (j.contains("regions")) {
            o.regions = j.at("regions").get<std::vector<int>>();
        }
        if (j.contains("extra")) {
            o.extra = j.at("extra");
        }
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidArgument, fmt::format("malformed transpiler options: {}", e.what()));
    }
    return o;
}

std::string_view to_string(Objective o) noexcept {
    switch (o) {
    case Objective::TwoQubitCount: return "two_qubit_count";
    case Objective::Depth: return "depth";
    case Objective::GateCount: return "gate_count";
    }
    return "two_qubit_count";
}

Objective objective_from_string(std::string_view s) {
    if (s == "two_qubit_count") return Objective::TwoQubitCount;
    if (s == "depth") return Objective::Depth;
    if (s == "gate_count") return Objective::GateCount;
    raise(ErrorCode::InvalidArgument, fmt::format("unknown objective '{}'", s));
}

bool better(const CircuitMetrics& a, const CircuitMetrics& b, Objective objective) {
    auto key = [objective](const CircuitMetrics& m) {
        switch (objective) {
        case Objective::Depth: return std::tuple(m.depth, m.two_qubit_count, m.gate_count);
        case Objective::GateCount: return std::tuple(m.gate_count, m.two_qubit_count, m.depth);
        case Objective::TwoQubitCount: break;
        }
        return std::tuple(m.two_qubit_count, m.depth, m.gate_count);
    };
    return key(a) < key(b);
}

QuantumCircuit decompose_to_basis(const QuantumCircuit& circuit, const std::set<GateKind>& basis) {
    QuantumCircuit out(circuit.n_qubits(), circuit.n_clbits());
    std::vector<Gate> buf;
    for (const auto& g : circuit.gates()) {
        buf.clear();
        expand(g, basis, buf, 0);
        for (auto& sub : buf) {
            out.append(std::move(sub));
        }
    }
    return out;
}

QuantumCircuit optimize_peephole(const QuantumCircuit& circuit) {
    std::vector<Gate> gates = circuit.gates();
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<char> alive(gates.size(), 1);
        std::vector<std::vector<std::size_t>> wire(static_cast<std::size_t>(circuit.n_qubits()));
        auto top = [&](int q) -> std::optional<std::size_t> {
            const auto& w = wire[static_cast<std::size_t>(q)];
            if (w.empty()) {
                return std::nullopt;
            }
            return w.back();
        };
        for (std::size_t i = 0; i < gates.size(); ++i) {
            Gate& g = gates[i];
            if (g.kind == GateKind::RZ) {
                const int q = g.qubits[0];
                const auto t = top(q);
                if (t && gates[*t].kind == GateKind::RZ) {
                    Gate& prev = gates[*t];
                    prev.params[0] = wrap_angle(prev.params[0] + g.params[0]);
                    alive[i] = 0;
                    changed = true;
                    if (is_zero_angle(prev.params[0])) {
                        alive[*t] = 0;
                        wire[static_cast<std::size_t>(q)].pop_back();
                    }
                    continue;
                }
                if (is_zero_angle(g.params[0])) {
                    alive[i] = 0;
                    changed = true;
                    continue;
                }
            } else if (g.kind == GateKind::X) {
                const int q = g.qubits[0];
                const auto t = top(q);
                if (t && gates[*t].kind == GateKind::X) {
                    alive[*t] = 0;
                    alive[i] = 0;
                    wire[static_cast<std::size_t>(q)].pop_back();
                    changed = true;
                    continue;
                }
            } else if (g.kind == GateKind::CX || g.kind == GateKind::CZ) {
                const int a = g.qubits[0];
                const int b = g.qubits[1];
                const auto ta = top(a);
                const auto tb = top(b);
                if (ta && tb && *ta == *tb && gates[*ta].kind == g.kind) {
                    const Gate& prev = gates[*ta];
                    const bool same = prev.qubits == g.qubits ||
                                      (g.kind == GateKind::CZ && prev.qubits[0] == b && prev.qubits[1] == a);
                    if (same) {
                        alive[*ta] = 0;
                        alive[i] = 0;
                        wire[static_cast<std::size_t>(a)].pop_back();
                        wire[static_cast<std::size_t>(b)].pop_back();
                        changed = true;
                        continue;
                    }
                }
            }
            for (int q : g.qubits) {
                wire[static_cast<std::size_t>(q)].push_back(i);
            }
        }
        std::vector<Gate> next;
        next.reserve(gates.size());
        for (std::size_t i = 0; i < gates.size(); ++i) {
            if (alive[i]) {
                next.push_back(std::move(gates[i]));
            }
        }
        gates = std::move(next);
    }
    QuantumCircuit out(circuit.n_qubits(), circuit.n_clbits());
    for (auto& g : gates) {
        out.append(std::move(g));
    }
    return out;
}

TranspileResult default_transpile(const QuantumCircuit& circuit, const DeviceSpec& device,
                                  const TranspileOptions& options) {
    const int n = device.n_qubits;
    if (circuit.n_qubits() > n) {
        raise(ErrorCode::CircuitTooLarge,
              fmt::format("circuit needs {} qubits, device '{}' has {}", circuit.n_qubits(), device.id, n));
    }
    if (options.regions && static_cast<int>(options.regions->size()) != n) {
        raise(ErrorCode::InvalidArgument, "regions must name a region for every device qubit");
    }
    const QuantumCircuit lowered = decompose_to_basis(circuit, device.basis_gates);

    std::vector<int> layout = complete_layout(options.initial_layout, n);
    const std::vector<int> initial = layout;
    std::vector<int> owner(static_cast<std::size_t>(n)); // physical -> virtual
    for (int v = 0; v < n; ++v) {
        owner[static_cast<std::size_t>(layout[static_cast<std::size_t>(v)])] = v;
    }
    const std::vector<int>* regions = options.regions ? &*options.regions : nullptr;

    QuantumCircuit routed(n, circuit.n_clbits());
    std::vector<Gate> swap_gates;
    auto phys = [&](int v) { return layout[static_cast<std::size_t>(v)]; };
    for (const auto& g : lowered.gates()) {
        if (g.qubits.size() == 2 && g.kind != GateKind::Barrier) {
            const int pa = phys(g.qubits[0]);
            const int pb = phys(g.qubits[1]);
            if (!device.topology.adjacent(pa, pb)) {
                const auto path = shortest_path(device.topology, pa, pb, regions);
                // Walk the first operand along the path until it neighbours the second.
                for (std::size_t k = 0; k + 2 < path.size(); ++k) {
                    const int x = path[k];
                    const int y = path[k + 1];
                    swap_gates.clear();
                    expand(Gate::two(GateKind::Swap, x, y), device.basis_gates, swap_gates, 0);
                    for (auto& sg : swap_gates) {
                        routed.append(std::move(sg));
                    }
                    const int vx = owner[static_cast<std::size_t>(x)];
                    const int vy = owner[static_cast<std::size_t>(y)];
                    std::swap(owner[static_cast<std::size_t>(x)], owner[static_cast<std::size_t>(y)]);
                    layout[static_cast<std::size_t>(vx)] = y;
                    layout[static_cast<std::size_t>(vy)] = x;
                }
            }
        }
        Gate mapped = g;
        for (auto& q : mapped.qubits) {
            q = phys(q);
        }
        routed.append(std::move(mapped));
    }

    TranspileResult r;
    r.circuit = options.optimization_level > 0 ? optimize_peephole(routed) : std::move(routed);
    r.initial_layout = initial;
    r.final_layout = layout;
    r.metrics = circuit_metrics(r.circuit);
    r.transpiler_name = "default";
    return r;
}

TranspileResult identity_transpile(const QuantumCircuit& circuit, const DeviceSpec& device,
                                   const TranspileOptions& /*options*/) {
    if (circuit.n_qubits() > device.n_qubits) {
        raise(ErrorCode::CircuitTooLarge, "circuit is wider than the device");
    }
    TranspileResult r;
    r.circuit = circuit;
    r.initial_layout = complete_layout(std::nullopt, device.n_qubits);
    r.final_layout = r.initial_layout;
    r.metrics = circuit_metrics(circuit);
    r.transpiler_name = "identity";
    check_conformance(r, device);
    return r;
}

void check_conformance(const TranspileResult& result, const DeviceSpec& device) {
    const auto& c = result.circuit;
    if (c.n_qubits() > device.n_qubits) {
        raise(ErrorCode::NonConformantCircuit, "result circuit is wider than the device");
    }
    if (!is_permutation_of(result.initial_layout, device.n_qubits) ||
        !is_permutation_of(result.final_layout, device.n_qubits)) {
        raise(ErrorCode::NonConformantCircuit, "layouts must be permutations of the device qubits");
    }
    for (const auto& g : c.gates()) {
        if (!device.supports(g.kind)) {
            raise(ErrorCode::NonConformantCircuit,
                  fmt::format("gate '{}' is not in the basis of device '{}'", g.name(), device.id));
        }
        if (g.kind != GateKind::Barrier && g.qubits.size() == 2 &&
            !device.topology.adjacent(g.qubits[0], g.qubits[1])) {
            raise(ErrorCode::NonConformantCircuit,
                  fmt::format("{} q[{}], q[{}] is not on a coupling edge", g.name(), g.qubits[0], g.qubits[1]));
        }
    }
}

nlohmann::json metrics_to_json(const CircuitMetrics& m) {
    return {{"gate_count", m.gate_count}, {"two_qubit_count", m.two_qubit_count}, {"depth", m.depth}};
}

TranspilerRegistry::TranspilerRegistry() {
    table_.emplace("default", default_transpile);
    table_.emplace("identity", identity_transpile);
}

void TranspilerRegistry::register_transpiler(const std::string& name, Transpiler fn) {
    if (name.empty() || !fn) {
        raise(ErrorCode::InvalidArgument, "transpiler needs a name and a callable");
    }
    std::unique_lock lock(mu_);
    if (!table_.emplace(name, std::move(fn)).second) {
        raise(ErrorCode::DuplicateName, fmt::format("transpiler '{}' is already registered", name));
    }
}

bool TranspilerRegistry::contains(const std::string& name) const {
    std::shared_lock lock(mu_);
    return table_.count(name) > 0;
}

std::vector<std::string> TranspilerRegistry::names() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [k, v] : table_) {
        out.push_back(k);
    }
    return out;
}

TranspileResult TranspilerRegistry::transpile(const QuantumCircuit& circuit, const DeviceSpec& device,
                                              const std::string& name, const TranspileOptions& options) const {
    Transpiler fn;
    {
        std::shared_lock lock(mu_);
        auto it = table_.find(name);
        if (it == table_.end()) {
            raise(ErrorCode::UnknownTranspiler, fmt::format("no transpiler named '{}'", name));
        }
        fn = it->second;
    }
    if (circuit.n_qubits() > device.n_qubits) {
        raise(ErrorCode::CircuitTooLarge, fmt::format("circuit needs {} qubits, device '{}' has {}",
                                                      circuit.n_qubits(), device.id, device.n_qubits));
    }
    TranspileResult r = fn(circuit, device, options);
    r.transpiler_name = name;
    r.metrics = circuit_metrics(r.circuit);
    check_conformance(r, device);
    return r;
}

CompareOutcome TranspilerRegistry::compare(const QuantumCircuit& circuit, const DeviceSpec& device,
                                           const std::vector<std::string>& names, Objective objective,
                                           const TranspileOptions& options) const {
    for (const auto& n : names) {
        if (!contains(n)) {
            raise(ErrorCode::UnknownTranspiler, fmt::format("no transpiler named '{}'", n));
        }
    }
    std::vector<std::future<TranspileResult>> futures;
    futures.reserve(names.size());
    for (const auto& n : names) {
        futures.push_back(std::async(std::launch::async, [&, n] { return transpile(circuit, device, n, options); }));
    }
    CompareOutcome out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        try {
            out.results.push_back(futures[i].get());
        } catch (const std::exception& e) {
            out.failures.push_back({names[i], e.what()});
        }
    }
    if (out.results.empty()) {
        std::string detail;
        for (const auto& f : out.failures) {
            detail += fmt::format("; {}: {}", f.transpiler_name, f.message);
        }
        raise(ErrorCode::AllTranspilersFailed, "every transpiler failed" + detail);
    }
    std::stable_sort(out.results.begin(), out.results.end(),
                     [objective](const TranspileResult& a, const TranspileResult& b) {
                         return better(a.metrics, b.metrics, objective);
                     });
    return out;
}

} // namespace qstack
