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

#include "qstack/records.hpp"

#include <array>
#include <chrono>
#include <ctime>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::string_view, N>& names, E v) noexcept {
    const auto i = static_cast<std::size_t>(v);
    return i < N ? names[i] : std::string_view{"?"};
}

template <typename E, std::size_t N>
E value_of(const std::array<std::string_view, N>& names, std::string_view s, std::string_view what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) {
            return static_cast<E>(i);
        }
    }
    raise(ErrorCode::InvalidArgument, fmt::format("unknown {} '{}'", what, s));
}

constexpr std::array<std::string_view, 4> kJobTypes{"sampling", "estimation", "multi_manual", "session"};
constexpr std::array<std::string_view, 6> kJobStatuses{"submitted", "queued",  "running",
                                                       "succeeded", "failed", "cancelled"};
constexpr std::array<std::string_view, 2> kRoles{"user", "admin"};
constexpr std::array<std::string_view, 3> kUserStatuses{"active", "suspended", "deleted"};
constexpr std::array<std::string_view, 4> kLeaseStates{"pending", "active", "closed", "expired"};

std::string str_or_empty(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? std::string{} : it->get<std::string>();
}

} // namespace

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(now.time_since_epoch()).count();
    const std::time_t secs = static_cast<std::time_t>(us / 1000000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:06}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec, us % 1000000);
}

std::string random_hex(std::size_t bytes) {
    std::vector<unsigned char> buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
        raise(ErrorCode::Internal, "entropy source failed");
    }
    std::string out;
    out.reserve(bytes * 2);
    for (unsigned char b : buf) {
        out += fmt::format("{:02x}", b);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        raise(ErrorCode::Internal, "sha256 failed");
    }
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += fmt::format("{:02x}", md[i]);
    }
    return out;
}

std::string_view to_string(JobType t) noexcept { return name_of(kJobTypes, t); }
std::string_view to_string(JobStatus s) noexcept { return name_of(kJobStatuses, s); }
JobType job_type_from_string(std::string_view s) { return value_of<JobType>(kJobTypes, s, "job type"); }
JobStatus job_status_from_string(std::string_view s) { return value_of<JobStatus>(kJobStatuses, s, "job status"); }

bool is_terminal(JobStatus s) noexcept {
    return s == JobStatus::Succeeded || s == JobStatus::Failed || s == JobStatus::Cancelled;
}

bool is_legal_transition(JobStatus from, JobStatus to) noexcept {
    switch (from) {
    case JobStatus::Submitted:
        return to == JobStatus::Queued || to == JobStatus::Cancelled || to == JobStatus::Failed;
    case JobStatus::Queued:
        return to == JobStatus::Running || to == JobStatus::Cancelled;
    case JobStatus::Running:
        return to == JobStatus::Succeeded || to == JobStatus::Failed;
    default:
        return false;
    }
}

nlohmann::json Job::to_json() const {
    return {{"id", id},
            {"owner", owner},
            {"device_id", device_id},
            {"job_type", to_string(job_type)},
            {"status", to_string(status)},
            {"name", name},
            {"description", description},
            {"shots", shots},
            {"payload", payload},
            {"options", options},
            {"result", result},
            {"submitted_at", submitted_at},
            {"started_at", started_at},
            {"ended_at", ended_at},
            {"error_message", error_message},
            {"session_id", session_id},
            {"queue_seq", queue_seq}};
}

Job Job::from_json(const nlohmann::json& j) {
    Job job;
    job.id = j.at("id").get<std::string>();
    job.owner = j.at("owner").get<std::string>();
    job.device_id = j.at("device_id").get<std::string>();
    job.job_type = job_type_from_string(j.at("job_type").get<std::string>());
    job.status = job_status_from_string(j.at("status").get<std::string>());
    job.name = str_or_empty(j, "name");
    job.description = str_or_empty(j, "description");
    job.shots = j.value("shots", std::uint64_t{0});
    job.payload = j.value("payload", nlohmann::json::object());
    job.options = j.value("options", nlohmann::json::object());
    job.result = j.value("result", nlohmann::json{});
    job.submitted_at = str_or_empty(j, "submitted_at");
    job.started_at = str_or_empty(j, "started_at");
    job.ended_at = str_or_empty(j, "ended_at");
    job.error_message = str_or_empty(j, "error_message");
    job.session_id = str_or_empty(j, "session_id");
    job.queue_seq = j.value("queue_seq", std::int64_t{0});
    return job;
}

std::string_view to_string(UserRole r) noexcept { return name_of(kRoles, r); }
std::string_view to_string(UserStatus s) noexcept { return name_of(kUserStatuses, s); }
UserRole user_role_from_string(std::string_view s) { return value_of<UserRole>(kRoles, s, "role"); }
UserStatus user_status_from_string(std::string_view s) {
    return value_of<UserStatus>(kUserStatuses, s, "user status");
}

nlohmann::json User::to_json() const {
    return {{"id", id}, {"name", name}, {"role", to_string(role)}, {"status", to_string(status)},
            {"created_at", created_at}};
}

User User::from_json(const nlohmann::json& j) {
    return User{j.at("id").get<std::string>(), str_or_empty(j, "name"),
                user_role_from_string(j.at("role").get<std::string>()),
                user_status_from_string(j.at("status").get<std::string>()), str_or_empty(j, "created_at")};
}

nlohmann::json ApiKey::to_json() const {
    return {{"id", id}, {"owner", owner}, {"created_at", created_at}, {"revoked", revoked}};
}

nlohmann::json ApiKey::to_record() const {
    auto j = to_json();
    j["hash"] = hash;
    return j;
}

ApiKey ApiKey::from_record(const nlohmann::json& j) {
    return ApiKey{j.at("id").get<std::string>(), j.at("hash").get<std::string>(), j.at("owner").get<std::string>(),
                  str_or_empty(j, "created_at"), j.value("revoked", false)};
}

std::string_view to_string(LeaseState s) noexcept { return name_of(kLeaseStates, s); }
LeaseState lease_state_from_string(std::string_view s) {
    return value_of<LeaseState>(kLeaseStates, s, "lease state");
}

nlohmann::json SessionLease::to_json() const {
    return {{"id", id},
            {"owner", owner},
            {"device_id", device_id},
            {"state", to_string(state)},
            {"ttl_seconds", ttl_seconds},
            {"created_at", created_at},
            {"activated_at", activated_at},
            {"released_at", released_at},
            {"last_activity", last_activity},
            {"sub_jobs", sub_jobs}};
}

nlohmann::json SessionLease::to_record() const {
    auto j = to_json();
    j["token_hash"] = token_hash;
    return j;
}

SessionLease SessionLease::from_record(const nlohmann::json& j) {
    SessionLease s;
    s.id = j.at("id").get<std::string>();
    s.owner = j.at("owner").get<std::string>();
    s.device_id = j.at("device_id").get<std::string>();
    s.state = lease_state_from_string(j.at("state").get<std::string>());
    s.ttl_seconds = j.value("ttl_seconds", std::int64_t{300});
    s.token_hash = str_or_empty(j, "token_hash");
    s.created_at = str_or_empty(j, "created_at");
    s.activated_at = str_or_empty(j, "activated_at");
    s.released_at = str_or_empty(j, "released_at");
    s.last_activity = str_or_empty(j, "last_activity");
    s.sub_jobs = j.value("sub_jobs", std::vector<std::string>{});
    return s;
}

nlohmann::json ExecRecord::to_json() const {
    return {{"seq", seq},          {"job_id", job_id},         {"device_id", device_id},
            {"session_id", session_id}, {"started_at", started_at}, {"ended_at", ended_at}};
}

nlohmann::json Calibration::to_json() const {
    nlohmann::json qubits = nlohmann::json::array();
    for (const auto& m : matrices) {
        qubits.push_back({{"eps01", m.eps01()}, {"eps10", m.eps10()}});
    }
    return {{"calibrated_at", calibrated_at}, {"shots", shots}, {"qubits", qubits}};
}

Calibration Calibration::from_json(const nlohmann::json& j) {
    Calibration c;
    c.calibrated_at = str_or_empty(j, "calibrated_at");
    c.shots = j.value("shots", std::uint64_t{0});
    for (const auto& q : j.at("qubits")) {
        c.matrices.push_back(ConfusionMatrix::from_rates(q.at("eps01").get<double>(), q.at("eps10").get<double>()));
    }
    return c;
}

nlohmann::json DeviceRecord::to_json() const {
    auto j = device_to_json(spec);
    j["calibration"] = calibration ? calibration->to_json() : nlohmann::json{};
    return j;
}

DeviceRecord DeviceRecord::from_json(const nlohmann::json& j) {
    DeviceRecord r;
    r.spec = device_from_json(j);
    if (auto it = j.find("calibration"); it != j.end() && !it->is_null()) {
        r.calibration = Calibration::from_json(*it);
    }
    return r;
}

} // namespace qstack
