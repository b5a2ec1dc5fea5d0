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

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace qstack {

/// Measured bitstring -> occurrence count. Character k (0 = leftmost) holds clbit
/// (n_bits - 1 - k), so clbit 0 is the rightmost character.
class Counts {
public:
    Counts() = default;
    explicit Counts(int n_bits) : n_bits_(n_bits) {}

    void add(const std::string& key, std::uint64_t n);

    [[nodiscard]] int n_bits() const noexcept { return n_bits_; }
    [[nodiscard]] std::uint64_t shots() const noexcept { return shots_; }
    [[nodiscard]] const std::map<std::string, std::uint64_t>& bins() const noexcept { return bins_; }
    [[nodiscard]] std::uint64_t at(const std::string& key) const;

    [[nodiscard]] nlohmann::json to_json() const;
    /// Accepts the `{bitstring: count}` object form. Throws KeyLengthMismatch on ragged keys.
    static Counts from_json(const nlohmann::json& j);

    friend bool operator==(const Counts&, const Counts&) = default;

private:
    int n_bits_ = 0;
    std::uint64_t shots_ = 0;
    std::map<std::string, std::uint64_t> bins_;
};

/// Clbit c of a key, honoring the rightmost-is-clbit-0 convention.
inline char clbit_char(const std::string& key, int clbit) {
    return key[key.size() - 1 - static_cast<std::size_t>(clbit)];
}

} // namespace qstack
