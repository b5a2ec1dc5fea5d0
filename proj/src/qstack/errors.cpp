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

#include "qstack/errors.hpp"

#include <fmt/format.h>

namespace qstack {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidCircuit: return "InvalidCircuit";
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::DuplicateQubitInLabel: return "DuplicateQubitInLabel";
    case ErrorCode::TooManyQubits: return "TooManyQubits";
    case ErrorCode::MeasureInStatevectorPath: return "MeasureInStatevectorPath";
    case ErrorCode::NoMeasurements: return "NoMeasurements";
    case ErrorCode::DeviceMismatch: return "DeviceMismatch";
    case ErrorCode::ZeroShots: return "ZeroShots";
    case ErrorCode::InvalidDevice: return "InvalidDevice";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownTranspiler: return "UnknownTranspiler";
    case ErrorCode::CircuitTooLarge: return "CircuitTooLarge";
    case ErrorCode::RoutingFailure: return "RoutingFailure";
    case ErrorCode::NonConformantCircuit: return "NonConformantCircuit";
    case ErrorCode::UnsupportedBasis: return "UnsupportedBasis";
    case ErrorCode::AllTranspilersFailed: return "AllTranspilersFailed";
    case ErrorCode::InsufficientQubits: return "InsufficientQubits";
    case ErrorCode::NoConnectedRegion: return "NoConnectedRegion";
    case ErrorCode::KeyLengthMismatch: return "KeyLengthMismatch";
    case ErrorCode::SingularConfusionMatrix: return "SingularConfusionMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooManyMeasuredQubits: return "TooManyMeasuredQubits";
    case ErrorCode::BaseCircuitHasMeasurements: return "BaseCircuitHasMeasurements";
    case ErrorCode::UnmeasuredSupportQubit: return "UnmeasuredSupportQubit";
    case ErrorCode::InsufficientShots: return "InsufficientShots";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::UnknownDevice: return "UnknownDevice";
    case ErrorCode::DeviceUnavailable: return "DeviceUnavailable";
    case ErrorCode::NotCancellable: return "NotCancellable";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::LeaseConflict: return "LeaseConflict";
    case ErrorCode::LeaseExpired: return "LeaseExpired";
    case ErrorCode::LeaseNotActive: return "LeaseNotActive";
    case ErrorCode::ForbiddenSubJobType: return "ForbiddenSubJobType";
    case ErrorCode::SpawnFailure: return "SpawnFailure";
    case ErrorCode::WallClockTimeout: return "WallClockTimeout";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::DeviceBusy: return "DeviceBusy";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::Storage: return "Storage";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

QasmError::QasmError(ErrorCode code, const std::string& message, int line, int column)
    : Error(code, fmt::format("{}:{}: {}", line, column, message)), line_(line), column_(column) {}

} // namespace qstack
