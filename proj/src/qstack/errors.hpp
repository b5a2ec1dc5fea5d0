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
#include <stdexcept>
#include <string>
#include <string_view>

namespace qstack {

enum class ErrorCode : std::uint16_t {
    InvalidArgument = 1,
    // circuit-core
    SyntaxError,
    UnsupportedConstruct,
    IndexOutOfRange,
    InvalidCircuit,
    MalformedLabel,
    DuplicateQubitInLabel,
    // device-sim
    TooManyQubits,
    MeasureInStatevectorPath,
    NoMeasurements,
    DeviceMismatch,
    ZeroShots,
    InvalidDevice,
    // transpiler
    DuplicateName,
    UnknownTranspiler,
    CircuitTooLarge,
    RoutingFailure,
    NonConformantCircuit,
    UnsupportedBasis,
    AllTranspilersFailed,
    // multiprog
    InsufficientQubits,
    NoConnectedRegion,
    KeyLengthMismatch,
    // mitigation
    SingularConfusionMatrix,
    DimensionMismatch,
    TooManyMeasuredQubits,
    // estimation
    BaseCircuitHasMeasurements,
    UnmeasuredSupportQubit,
    InsufficientShots,
    // engine
    ValidationFailed,
    UnknownDevice,
    DeviceUnavailable,
    NotCancellable,
    NotFound,
    Forbidden,
    LeaseConflict,
    LeaseExpired,
    LeaseNotActive,
    ForbiddenSubJobType,
    SpawnFailure,
    WallClockTimeout,
    // cloud-api
    Unauthorized,
    DeviceBusy,
    Conflict,
    Storage,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the qstack core.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parser diagnostics carry a 1-based source position.
class QasmError : public Error {
public:
    QasmError(ErrorCode code, const std::string& message, int line, int column);

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace qstack
