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

#include "qstack/mitigation.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

void apply_per_axis(std::vector<double>& vec, std::span<const AxisMap> maps) {
    const auto m = maps.size();
    if (m >= 63 || vec.size() != (std::size_t{1} << m)) {
        raise(ErrorCode::DimensionMismatch,
              fmt::format("vector of length {} does not match {} axis maps", vec.size(), m));
    }
    for (std::size_t k = 0; k < m; ++k) {
        const auto& [mat, div] = maps[k];
        const std::size_t stride = std::size_t{1} << k;
        for (std::size_t base = 0; base < vec.size(); base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                const double p0 = vec[i];
                const double p1 = vec[i + stride];
                vec[i] = (mat[0][0] * p0 + mat[0][1] * p1) / div;
                vec[i + stride] = (mat[1][0] * p0 + mat[1][1] * p1) / div;
            }
        }
    }
}

std::vector<double> apply_confusion(std::vector<double> p, std::span<const ConfusionMatrix> matrices) {
    std::vector<AxisMap> maps;
    maps.reserve(matrices.size());
    for (const auto& c : matrices) {
        maps.push_back({c.a, 1.0});
    }
    apply_per_axis(p, maps);
    return p;
}

std::string index_to_key(std::size_t index, int n_bits) {
    std::string key(static_cast<std::size_t>(n_bits), '0');
    for (int c = 0; c < n_bits; ++c) {
        if ((index >> c) & 1U) {
            key[key.size() - 1 - static_cast<std::size_t>(c)] = '1';
        }
    }
    return key;
}

std::vector<double> counts_to_probabilities(const Counts& counts) {
    if (counts.shots() == 0) {
        raise(ErrorCode::InvalidArgument, "counts are empty");
    }
    std::vector<double> p(std::size_t{1} << counts.n_bits(), 0.0);
    const auto total = static_cast<double>(counts.shots());
    for (const auto& [key, n] : counts.bins()) {
        std::size_t idx = 0;
        for (int c = 0; c < counts.n_bits(); ++c) {
            if (clbit_char(key, c) == '1') {
                idx |= std::size_t{1} << c;
            }
        }
        p[idx] = static_cast<double>(n) / total;
    }
    return p;
}

namespace {

std::map<std::string, double> to_map(const std::vector<double>& v, int n_bits) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            out.emplace(index_to_key(i, n_bits), v[i]);
        }
    }
    return out;
}

} // namespace

std::map<std::string, double> QuasiDistribution::raw_map() const { return to_map(raw, n_bits); }
std::map<std::string, double> QuasiDistribution::clipped_map() const { return to_map(clipped, n_bits); }

Mitigator::Mitigator(std::vector<ConfusionMatrix> matrices, int max_qubits)
    : matrices_(std::move(matrices)), max_qubits_(max_qubits) {
    if (static_cast<int>(matrices_.size()) > max_qubits_) {
        raise(ErrorCode::TooManyMeasuredQubits,
              fmt::format("{} measured qubits exceed the mitigation cap of {}", matrices_.size(), max_qubits_));
    }
    inverse_.reserve(matrices_.size());
    for (std::size_t k = 0; k < matrices_.size(); ++k) {
        const auto& a = matrices_[k].a;
        const double det = matrices_[k].det();
        if (!(det > 0.0)) {
            raise(ErrorCode::SingularConfusionMatrix,
                  fmt::format("confusion matrix for clbit {} is singular (eps01 + eps10 >= 1)", k));
        }
        inverse_.push_back({{{{a[1][1], -a[0][1]}, {-a[1][0], a[0][0]}}}, det});
    }
}

std::vector<double> Mitigator::unapply(std::vector<double> p) const {
    apply_per_axis(p, inverse_);
    return p;
}

QuasiDistribution Mitigator::apply(const Counts& counts) const {
    if (counts.n_bits() != n_bits()) {
        raise(ErrorCode::DimensionMismatch,
              fmt::format("counts have {} bits, mitigator has {} matrices", counts.n_bits(), n_bits()));
    }
    QuasiDistribution q;
    q.n_bits = n_bits();
    q.raw = unapply(counts_to_probabilities(counts));
    q.clipped.resize(q.raw.size());
    double total = 0.0;
    for (std::size_t i = 0; i < q.raw.size(); ++i) {
        q.clipped[i] = std::max(q.raw[i], 0.0);
        total += q.clipped[i];
    }
    if (total > 0.0) {
        for (auto& v : q.clipped) {
            v /= total;
        }
    }
    return q;
}

std::vector<ConfusionMatrix> matrices_for_clbits(const QuantumCircuit& physical,
                                                 const std::vector<ConfusionMatrix>& calibration) {
    std::vector<ConfusionMatrix> out(static_cast<std::size_t>(physical.n_clbits()));
    for (const auto& g : physical.gates()) {
        if (g.kind == GateKind::Measure) {
            const auto q = static_cast<std::size_t>(g.qubits.at(0));
            if (q >= calibration.size()) {
                raise(ErrorCode::DimensionMismatch,
                      fmt::format("no calibration for qubit {} ({} entries)", q, calibration.size()));
            }
            out[static_cast<std::size_t>(g.clbit)] = calibration[q];
        }
    }
    return out;
}

} // namespace qstack
