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

#include <string>
#include <string_view>

#include "qstack/circuit.hpp"

namespace qstack {

/// Parses the supported OpenQASM 3 subset: one `qubit[n]` and at most one `bit[n]`
/// register, stdgates applications, `c[i] = measure q[j];` (or `measure q[j] -> c[i];`)
/// and `barrier`. Throws QasmError with a 1-based line/column on failure.
QuantumCircuit parse_qasm(std::string_view text);

/// Canonical one-statement-per-line text. Angles use 17 significant digits.
std::string emit_qasm(const QuantumCircuit& circuit);

} // namespace qstack
