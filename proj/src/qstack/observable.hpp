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

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace qstack {

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

/// Qubit index -> non-identity Pauli letter. Absent index means identity.
using PauliString = std::map<int, Pauli>;

/// "X 0 Y 2"; the empty string is the all-identity term.
std::string pauli_label(const PauliString& p);

/// Real-weighted sum of Pauli strings. Coefficients are finite and nonzero.
class Observable {
public:
    using Terms = std::map<PauliString, double>;

    Observable() = default;

    /// Adds `coeff` to the term, pruning it if the sum becomes exactly zero.
    void add_term(const PauliString& p, double coeff);

    [[nodiscard]] const Terms& terms() const noexcept { return terms_; }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return terms_.size(); }

    /// Largest qubit index referenced, or -1.
    [[nodiscard]] int max_qubit() const noexcept;

    friend bool operator==(const Observable&, const Observable&) = default;

private:
    Terms terms_;
};

PauliString parse_pauli_label(std::string_view label);

/// Merges duplicate labels by summing coefficients.
/// Throws MalformedLabel, DuplicateQubitInLabel, or InvalidArgument for non-finite coefficients.
Observable parse_operator(const std::vector<std::pair<std::string, double>>& pairs);

/// Parses the JSON array form `[[label, coeff], ...]`. Throws InvalidArgument for other shapes.
Observable operator_from_json(const nlohmann::json& j);

/// Back to the `[label, coeff]` pair list, in term order.
std::vector<std::pair<std::string, double>> operator_pairs(const Observable& obs);

} // namespace qstack
