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

#include "qstack/device.hpp"

namespace qstack {

/// A[r][t] = P(read r | true t); columns sum to one.
struct ConfusionMatrix {
    std::array<std::array<double, 2>, 2> a{{{1.0, 0.0}, {0.0, 1.0}}};

    static ConfusionMatrix from_rates(double eps01, double eps10) {
        return ConfusionMatrix{{{{1.0 - eps01, eps10}, {eps01, 1.0 - eps10}}}};
    }
    static ConfusionMatrix from_rates(const ReadoutError& e) { return from_rates(e.eps01, e.eps10); }

    [[nodiscard]] double eps01() const noexcept { return a[1][0]; }
    [[nodiscard]] double eps10() const noexcept { return a[0][1]; }
    [[nodiscard]] double det() const noexcept { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
    [[nodiscard]] ReadoutError rates() const noexcept { return {eps01(), eps10()}; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

} // namespace qstack
