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

#include "qstack/counts.hpp"

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

void Counts::add(const std::string& key, std::uint64_t n) {
    if (static_cast<int>(key.size()) != n_bits_) {
        raise(ErrorCode::KeyLengthMismatch,
              fmt::format("key '{}' has length {}, expected {}", key, key.size(), n_bits_));
    }
    for (char ch : key) {
        if (ch != '0' && ch != '1') {
            raise(ErrorCode::InvalidArgument, fmt::format("key '{}' is not a bitstring", key));
        }
    }
    if (n == 0) {
        return;
    }
    bins_[key] += n;
    shots_ += n;
}

std::uint64_t Counts::at(const std::string& key) const {
    auto it = bins_.find(key);
    return it == bins_.end() ? 0 : it->second;
}

nlohmann::json Counts::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : bins_) {
        j[k] = v;
    }
    return j;
}

Counts Counts::from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        raise(ErrorCode::InvalidArgument, "counts must be a JSON object");
    }
    if (j.empty()) {
        return Counts(0);
    }
    Counts c(static_cast<int>(j.begin().key().size()));
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number_unsigned() && !it.value().is_number_integer()) {
            raise(ErrorCode::InvalidArgument, "count values must be integers");
        }
        c.add(it.key(), it.value().get<std::uint64_t>());
    }
    return c;
}

} // namespace qstack
