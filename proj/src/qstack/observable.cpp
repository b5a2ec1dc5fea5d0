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

#include "qstack/observable.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

std::string pauli_label(const PauliString& p) {
    std::string out;
    for (const auto& [q, letter] : p) {
        if (!out.empty()) {
            out += ' ';
        }
        out += fmt::format("{} {}", static_cast<char>(letter), q);
    }
    return out;
}

void Observable::add_term(const PauliString& p, double coeff) {
    if (!std::isfinite(coeff)) {
        raise(ErrorCode::InvalidArgument, fmt::format("non-finite coefficient for term '{}'", pauli_label(p)));
    }
    auto [it, inserted] = terms_.try_emplace(p, 0.0);
    it->second += coeff;
    if (it->second == 0.0) {
        terms_.erase(it);
    }
}

int Observable::max_qubit() const noexcept {
    int m = -1;
    for (const auto& [p, c] : terms_) {
        if (!p.empty()) {
            m = std::max(m, p.rbegin()->first);
        }
    }
    return m;
}

PauliString parse_pauli_label(std::string_view label) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < label.size()) {
        while (i < label.size() && std::isspace(static_cast<unsigned char>(label[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < label.size() && !std::isspace(static_cast<unsigned char>(label[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.push_back(label.substr(start, i - start));
        }
    }
    if (tokens.size() % 2 != 0) {
        raise(ErrorCode::MalformedLabel,
              fmt::format("label '{}' must alternate Pauli letters and qubit indices", label));
    }
    PauliString out;
    std::map<int, bool> seen;
    for (std::size_t k = 0; k < tokens.size(); k += 2) {
        const auto letter = tokens[k];
        const auto index = tokens[k + 1];
        if (letter.size() != 1 || std::string_view("IXYZ").find(letter[0]) == std::string_view::npos) {
            raise(ErrorCode::MalformedLabel, fmt::format("'{}' in label '{}' is not one of I, X, Y, Z", letter, label));
        }
        int q = -1;
        auto [ptr, ec] = std::from_chars(index.data(), index.data() + index.size(), q);
        if (ec != std::errc() || ptr != index.data() + index.size() || q < 0) {
            raise(ErrorCode::MalformedLabel, fmt::format("'{}' in label '{}' is not a qubit index", index, label));
        }
        if (seen[q]) {
            raise(ErrorCode::DuplicateQubitInLabel, fmt::format("qubit {} appears twice in label '{}'", q, label));
        }
        seen[q] = true;
        if (letter[0] != 'I') {
            out.emplace(q, static_cast<Pauli>(letter[0]));
        }
    }
    return out;
}

Observable parse_operator(const std::vector<std::pair<std::string, double>>& pairs) {
    Observable obs;
    for (const auto& [label, coeff] : pairs) {
        obs.add_term(parse_pauli_label(label), coeff);
    }
    return obs;
}

std::vector<std::pair<std::string, double>> operator_pairs(const Observable& obs) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(obs.size());
    for (const auto& [p, c] : obs.terms()) {
        out.emplace_back(pauli_label(p), c);
    }
    return out;
}

Observable operator_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        raise(ErrorCode::InvalidArgument, "operator must be an array of [label, coefficient] pairs");
    }
    std::vector<std::pair<std::string, double>> pairs;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_number()) {
            raise(ErrorCode::InvalidArgument, "operator entries must be [label, coefficient]");
        }
        pairs.emplace_back(p[0].get<std::string>(), p[1].get<double>());
    }
    return parse_operator(pairs);
}

} // namespace qstack
