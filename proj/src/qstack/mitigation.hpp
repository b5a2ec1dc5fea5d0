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

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qstack/circuit.hpp"
#include "qstack/counts.hpp"
#include "qstack/readout.hpp"

namespace qstack {

inline constexpr int kDefaultMaxMitigatedQubits = 16;

using RealMatrix2 = std::array<std::array<double, 2>, 2>;

/// One per-axis factor: each pair (p0, p1) along the axis becomes (M * pair) / divisor.
struct AxisMap {
    RealMatrix2 m{{{1.0, 0.0}, {0.0, 1.0}}};
    double divisor = 1.0;
};

/// Applies a tensor product of 2x2 maps to a dense vector of length 2^m, where map k acts
/// on index bit k. O(m * 2^m). Throws DimensionMismatch.
void apply_per_axis(std::vector<double>& vec, std::span<const AxisMap> maps);

/// Forward readout model A * p with A the tensor product of the given matrices.
std::vector<double> apply_confusion(std::vector<double> p, std::span<const ConfusionMatrix> matrices);

/// Dense distribution (index bit c = clbit c) with both the raw and the clipped view.
struct QuasiDistribution {
    int n_bits = 0;
    std::vector<double> raw;
    std::vector<double> clipped;

    /// Nonzero entries keyed by bitstring.
    [[nodiscard]] std::map<std::string, double> raw_map() const;
    [[nodiscard]] std::map<std::string, double> clipped_map() const;
};

class Mitigator {
public:
    /// Throws SingularConfusionMatrix (det <= 0), TooManyMeasuredQubits.
    explicit Mitigator(std::vector<ConfusionMatrix> matrices, int max_qubits = kDefaultMaxMitigatedQubits);

    [[nodiscard]] int n_bits() const noexcept { return static_cast<int>(matrices_.size()); }
    [[nodiscard]] const std::vector<ConfusionMatrix>& matrices() const noexcept { return matrices_; }

    /// Inverse readout model on an explicit probability vector.
    [[nodiscard]] std::vector<double> unapply(std::vector<double> p) const;

    /// Throws DimensionMismatch, InvalidArgument on empty counts.
    [[nodiscard]] QuasiDistribution apply(const Counts& counts) const;

private:
    std::vector<ConfusionMatrix> matrices_;
    std::vector<AxisMap> inverse_;
    int max_qubits_;
};

inline Mitigator build_mitigator(std::vector<ConfusionMatrix> matrices,
                                 int max_qubits = kDefaultMaxMitigatedQubits) {
    return Mitigator(std::move(matrices), max_qubits);
}

/// Confusion matrix per clbit of a physical circuit: the calibration entry of the qubit that
/// writes the clbit, identity for clbits never written.
std::vector<ConfusionMatrix> matrices_for_clbits(const QuantumCircuit& physical,
                                                 const std::vector<ConfusionMatrix>& calibration);

std::vector<double> counts_to_probabilities(const Counts& counts);
std::string index_to_key(std::size_t index, int n_bits);

} // namespace qstack
