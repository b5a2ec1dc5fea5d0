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

#include "qstack/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qstack/errors.hpp"
#include "qstack/qasm.hpp"
#include "qstack/simulator.hpp"

namespace qstack {

namespace {

bool compatible(const PauliString& basis, const PauliString& term) {
    for (const auto& [q, p] : term) {
        auto it = basis.find(q);
        if (it != basis.end() && it->second != p) {
            return false;
        }
    }
    return true;
}

int support_parity(const std::string& key, const PauliString& pauli, const std::map<int, int>& clbits) {
    int parity = 0;
    for (const auto& [q, _] : pauli) {
        parity ^= clbit_char(key, clbits.at(q)) == '1' ? 1 : 0;
    }
    return parity;
}

void check_support(const PauliString& pauli, const std::map<int, int>& clbits, int n_bits) {
    for (const auto& [q, _] : pauli) {
        auto it = clbits.find(q);
        if (it == clbits.end() || it->second < 0 || it->second >= n_bits) {
            raise(ErrorCode::UnmeasuredSupportQubit, fmt::format("qubit {} has no measured clbit", q));
        }
    }
}

} // namespace

Grouping group_terms(const Observable& observable) {
    Grouping out;
    std::vector<std::pair<PauliString, double>> terms;
    for (const auto& [p, c] : observable.terms()) {
        if (p.empty()) {
            out.identity_constant += c;
        } else {
            terms.emplace_back(p, c);
        }
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return std::abs(a.second) > std::abs(b.second); });
    for (auto& term : terms) {
        auto it = std::find_if(out.groups.begin(), out.groups.end(),
                               [&](const MeasurementGroup& g) { return compatible(g.basis, term.first); });
        if (it == out.groups.end()) {
            out.groups.emplace_back();
            it = std::prev(out.groups.end());
        }
        it->basis.insert(term.first.begin(), term.first.end());
        it->terms.push_back(std::move(term));
    }
    return out;
}

std::map<int, int> clbit_assignment(const MeasurementGroup& group) {
    std::map<int, int> out;
    int c = 0;
    for (const auto& [q, _] : group.basis) {
        out.emplace(q, c++);
    }
    return out;
}

QuantumCircuit measurement_circuit(const QuantumCircuit& base, const MeasurementGroup& group) {
    if (base.has_measurements()) {
        raise(ErrorCode::BaseCircuitHasMeasurements, "estimation circuits must not contain measurements");
    }
    if (group.basis.empty()) {
        raise(ErrorCode::InvalidArgument, "measurement group has an empty basis");
    }
    const int width = std::max(base.n_qubits(), group.basis.rbegin()->first + 1);
    QuantumCircuit out(width, static_cast<int>(group.basis.size()));
    for (const auto& g : base.gates()) {
        out.append(g);
    }
    for (const auto& [q, p] : group.basis) {
        if (p == Pauli::X) {
            out.h(q);
        } else if (p == Pauli::Y) {
            out.append(Gate::one(GateKind::Sdg, q));
            out.h(q);
        }
    }
    for (const auto& [q, c] : clbit_assignment(group)) {
        out.measure(q, c);
    }
    return out;
}

double expectation_from_counts(const Counts& counts, const PauliString& pauli, const std::map<int, int>& clbits) {
    check_support(pauli, clbits, counts.n_bits());
    if (counts.shots() == 0) {
        raise(ErrorCode::InvalidArgument, "counts are empty");
    }
    double acc = 0.0;
    for (const auto& [key, n] : counts.bins()) {
        const double w = static_cast<double>(n);
        acc += support_parity(key, pauli, clbits) ? -w : w;
    }
    return acc / static_cast<double>(counts.shots());
}

double expectation_from_quasi(const QuasiDistribution& quasi, const PauliString& pauli,
                              const std::map<int, int>& clbits) {
    check_support(pauli, clbits, quasi.n_bits);
    double acc = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < quasi.raw.size(); ++i) {
        int parity = 0;
        for (const auto& [q, _] : pauli) {
            parity ^= static_cast<int>((i >> clbits.at(q)) & 1U);
        }
        acc += parity ? -quasi.raw[i] : quasi.raw[i];
        total += quasi.raw[i];
    }
    return acc / total;
}

nlohmann::json EstimateResult::to_json() const {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : per_group) {
        nlohmann::json entry{{"basis", pauli_label(g.basis)}, {"shots", g.shots}, {"counts", g.counts.to_json()}};
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [label, coeff] : g.terms) {
            terms.push_back(nlohmann::json::array({label, coeff}));
        }
        entry["terms"] = std::move(terms);
        entry["term_expectations"] = g.term_expectations;
        if (g.mitigated) {
            entry["quasi_distribution"] = g.mitigated->raw_map();
        }
        entry["transpiled_qasm"] = g.transpiled_qasm;
        groups.push_back(std::move(entry));
    }
    return {{"value", value}, {"identity_constant", identity_constant}, {"per_group", groups}};
}

EstimateResult estimate(const QuantumCircuit& circuit, const Observable& observable, std::uint64_t shots,
                        const DeviceSpec& device, std::uint64_t seed, const TranspilerRegistry& registry,
                        const EstimateOptions& options) {
    if (circuit.has_measurements()) {
        raise(ErrorCode::BaseCircuitHasMeasurements, "estimation circuits must not contain measurements");
    }
    const Grouping grouping = group_terms(observable);
    EstimateResult result;
    result.identity_constant = grouping.identity_constant;
    result.value = grouping.identity_constant;
    const auto n_groups = static_cast<std::uint64_t>(grouping.groups.size());
    if (n_groups == 0) {
        return result;
    }
    if (shots < n_groups) {
        raise(ErrorCode::InsufficientShots, fmt::format("{} shots cannot cover {} measurement groups", shots, n_groups));
    }
    if (observable.max_qubit() >= device.n_qubits) {
        raise(ErrorCode::CircuitTooLarge, fmt::format("observable acts on qubit {} but device '{}' has {} qubits",
                                                      observable.max_qubit(), device.id, device.n_qubits));
    }

    std::vector<ConfusionMatrix> calibration;
    if (options.mitigation) {
        if (options.calibration) {
            calibration = *options.calibration;
        } else {
            for (const auto& e : device.readout_errors) {
                calibration.push_back(ConfusionMatrix::from_rates(e));
            }
        }
    }

    const std::uint64_t base_shots = shots / n_groups;
    const std::uint64_t remainder = shots % n_groups;
    for (std::uint64_t i = 0; i < n_groups; ++i) {
        const auto& group = grouping.groups[i];
        GroupResult gr;
        gr.basis = group.basis;
        for (const auto& [pauli, coeff] : group.terms) {
            gr.terms.emplace_back(pauli_label(pauli), coeff);
        }
        gr.shots = base_shots + (i < remainder ? 1 : 0);

        const QuantumCircuit logical = measurement_circuit(circuit, group);
        const TranspileResult tr = registry.transpile(logical, device, options.transpiler, options.transpile);
        gr.transpiled_qasm = emit_qasm(tr.circuit);
        gr.counts = sample(tr.circuit, gr.shots, seed + i, device, SampleOptions{options.noise});

        const auto clbits = clbit_assignment(group);
        if (options.mitigation) {
            gr.mitigated = Mitigator(matrices_for_clbits(tr.circuit, calibration)).apply(gr.counts);
        }
        for (const auto& [pauli, coeff] : group.terms) {
            const double e = gr.mitigated ? expectation_from_quasi(*gr.mitigated, pauli, clbits)
                                          : expectation_from_counts(gr.counts, pauli, clbits);
            gr.term_expectations.push_back(e);
            result.value += coeff * e;
        }
        result.per_group.push_back(std::move(gr));
    }
    return result;
}

} // namespace qstack
