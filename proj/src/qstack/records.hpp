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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/device.hpp"
#include "qstack/readout.hpp"

namespace qstack {

/// UTC, microsecond resolution, lexicographically ordered: 2026-01-02T03:04:05.123456Z
std::string utc_now();

/// 32 lowercase hex characters from the OS entropy source.
std::string random_hex(std::size_t bytes = 16);
std::string sha256_hex(std::string_view data);

enum class JobType { Sampling, Estimation, MultiManual, Session };
enum class JobStatus { Submitted, Queued, Running, Succeeded, Failed, Cancelled };

std::string_view to_string(JobType t) noexcept;
std::string_view to_string(JobStatus s) noexcept;
JobType job_type_from_string(std::string_view s);
JobStatus job_status_from_string(std::string_view s);
bool is_terminal(JobStatus s) noexcept;
bool is_legal_transition(JobStatus from, JobStatus to) noexcept;

struct Job {
    std::string id;
    std::string owner;
    std::string device_id;
    JobType job_type = JobType::Sampling;
    JobStatus status = JobStatus::Submitted;
    std::string name;
    std::string description;
    std::uint64_t shots = 0;
    nlohmann::json payload = nlohmann::json::object();
    nlohmann::json options = nlohmann::json::object();
    nlohmann::json result; // null unless succeeded
    std::string submitted_at;
    std::string started_at;
    std::string ended_at;
    std::string error_message;
    /// Set on sub-jobs executed inside a session lease.
    std::string session_id;
    std::int64_t queue_seq = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    static Job from_json(const nlohmann::json& j);
};

enum class UserRole { User, Admin };
enum class UserStatus { Active, Suspended, Deleted };

std::string_view to_string(UserRole r) noexcept;
std::string_view to_string(UserStatus s) noexcept;
UserRole user_role_from_string(std::string_view s);
UserStatus user_status_from_string(std::string_view s);

struct User {
    std::string id;
    std::string name;
    UserRole role = UserRole::User;
    UserStatus status = UserStatus::Active;
    std::string created_at;

    [[nodiscard]] nlohmann::json to_json() const;
    static User from_json(const nlohmann::json& j);
};

struct ApiKey {
    std::string id;
    std::string hash; // sha256 of the secret
    std::string owner;
    std::string created_at;
    bool revoked = false;

    /// Omits the hash.
    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] nlohmann::json to_record() const;
    static ApiKey from_record(const nlohmann::json& j);
};

enum class LeaseState { Pending, Active, Closed, Expired };

std::string_view to_string(LeaseState s) noexcept;
LeaseState lease_state_from_string(std::string_view s);

struct SessionLease {
    std::string id; // equals the session job id
    std::string owner;
    std::string device_id;
    LeaseState state = LeaseState::Pending;
    std::int64_t ttl_seconds = 300;
    std::string token_hash;
    std::string created_at;
    std::string activated_at;
    std::string released_at;
    std::string last_activity;
    std::vector<std::string> sub_jobs;

    /// Omits the token hash.
    [[nodiscard]] nlohmann::json to_json() const;
    [[nodiscard]] nlohmann::json to_record() const;
    static SessionLease from_record(const nlohmann::json& j);
};

/// Append-only device execution log entry.
struct ExecRecord {
    std::int64_t seq = 0;
    std::string job_id;
    std::string device_id;
    std::string session_id;
    std::string started_at;
    std::string ended_at;

    [[nodiscard]] nlohmann::json to_json() const;
};

struct Calibration {
    std::string calibrated_at;
    std::uint64_t shots = 0;
    std::vector<ConfusionMatrix> matrices;

    [[nodiscard]] nlohmann::json to_json() const;
    static Calibration from_json(const nlohmann::json& j);
};

struct DeviceRecord {
    DeviceSpec spec;
    std::optional<Calibration> calibration;

    /// DeviceSpec JSON plus a `calibration` snapshot (null until measured).
    [[nodiscard]] nlohmann::json to_json() const;
    static DeviceRecord from_json(const nlohmann::json& j);
};

} // namespace qstack
