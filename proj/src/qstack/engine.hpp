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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/errors.hpp"
#include "qstack/records.hpp"
#include "qstack/store.hpp"
#include "qstack/transpiler.hpp"

namespace qstack {

struct Principal {
    std::string user_id;
    UserRole role = UserRole::User;
    /// Non-empty when authenticated by a session token; limits access to that session.
    std::string session_scope;

    [[nodiscard]] bool is_admin() const noexcept { return role == UserRole::Admin; }
};

struct JobDraft {
    JobType job_type = JobType::Sampling;
    std::string device_id;
    std::string name;
    std::string description;
    std::uint64_t shots = 0;
    nlohmann::json payload = nlohmann::json::object();
    nlohmann::json options = nlohmann::json::object();

    /// Accepts the POST /jobs body: {device_id, job_type, name, description, shots, payload, options}.
    /// A top-level `qasm` / `operator` / `circuits` is folded into the payload.
    static JobDraft from_json(const nlohmann::json& j);
};

/// Raised by submit when the draft fails validation; the failed job is already stored.
class JobValidationError : public Error {
public:
    JobValidationError(std::string job_id, const std::string& message)
        : Error(ErrorCode::ValidationFailed, message), job_id_(std::move(job_id)) {}
    [[nodiscard]] const std::string& job_id() const noexcept { return job_id_; }

private:
    std::string job_id_;
};

struct EngineConfig {
    /// Directory session programs are resolved in.
    std::string program_dir;
    /// Public base URL of the HTTP surface; programs get SESSION_URL = base + "/sessions/{id}".
    std::string public_url = "http://127.0.0.1:8080";
    std::chrono::seconds program_timeout{600};
    std::int64_t default_ttl_seconds = 300;
    std::uint64_t calibration_shots = 100000;
    int max_qubits = 20;
};

class Engine {
public:
    /// Marks jobs left running by a previous process as failed and expires their leases.
    Engine(Store& store, const TranspilerRegistry& registry, EngineConfig config = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Starts one worker thread per registered device. Without it, callers drive
    /// worker_step themselves.
    void start();
    void stop();
    void set_public_url(std::string url);
    [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }
    [[nodiscard]] Store& store() noexcept { return store_; }

    // devices
    DeviceRecord register_device(const DeviceSpec& spec);
    /// Merges `patch` into the device JSON. Throws NotFound, InvalidDevice.
    DeviceRecord update_device(const std::string& id, const nlohmann::json& patch);
    /// Throws NotFound, DeviceBusy (queued or running work).
    void delete_device(const std::string& id);
    DeviceRecord calibrate_device(const std::string& id, std::uint64_t shots, std::uint64_t seed);
    [[nodiscard]] DeviceRecord device(const std::string& id) const;

    // jobs
    /// Throws UnknownDevice, DeviceUnavailable, JobValidationError.
    std::string submit(const Principal& who, const JobDraft& draft);
    /// Runs the head of the device queue to completion. Returns the processed job id.
    std::optional<std::string> worker_step(const std::string& device_id);
    /// Throws NotFound, Forbidden, NotCancellable.
    void cancel(const std::string& job_id, const Principal& who);
    /// Throws NotFound when the job does not exist or is not visible to `who`.
    [[nodiscard]] Job job_for(const std::string& job_id, const Principal& who) const;
    [[nodiscard]] std::vector<Job> jobs_for(const Principal& who, JobFilter filter) const;

    // sessions
    /// Queues a session job; the lease id equals the job id.
    std::string open_session(const Principal& who, const std::string& device_id, std::int64_t ttl_seconds,
                             const std::string& name, const nlohmann::json& manifest);
    /// Runs a sampling or estimation draft immediately on the leased device.
    /// Throws NotFound, LeaseNotActive, LeaseExpired, ForbiddenSubJobType, JobValidationError.
    Job session_submit(const std::string& lease_id, const Principal& who, JobDraft draft);
    void close_session(const std::string& lease_id, const Principal& who);
    [[nodiscard]] SessionLease session_for(const std::string& lease_id, const Principal& who) const;
    /// Lease owning an active session token, if any.
    [[nodiscard]] std::optional<SessionLease> session_by_token(const std::string& token) const;

    /// Blocks until the device queue is empty and nothing is executing, or the timeout passes.
    bool wait_idle(const std::string& device_id, std::chrono::milliseconds timeout);

private:
    struct DeviceSlot {
        std::mutex step_mutex; // one logical executor
        std::mutex exec_mutex; // one execution at a time
        std::mutex wake_mutex;
        std::condition_variable wake_cv;
        bool wake = false;
        bool stop = false;
        std::thread thread;
    };

    DeviceSlot& slot(const std::string& device_id);
    void notify(const std::string& device_id);
    void spawn_worker(const std::string& device_id);
    void worker_loop(const std::string& device_id);
    void recover();

    void validate_draft(const JobDraft& draft, const DeviceRecord& device) const;
    nlohmann::json execute(const Job& job, DeviceRecord device);
    void run_session(Job job);
    std::vector<ConfusionMatrix> calibration_for(DeviceRecord& device, std::uint64_t seed);
    void finish(Job job, std::int64_t exec_seq, const nlohmann::json& result, const std::string& error);
    bool lease_expired(const SessionLease& lease) const;

    Store& store_;
    const TranspilerRegistry& registry_;
    EngineConfig config_;

    mutable std::mutex slots_mutex_;
    std::map<std::string, std::unique_ptr<DeviceSlot>> slots_;
    bool started_ = false;

    mutable std::mutex lease_mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> lease_activity_;
    std::map<std::string, std::string> lease_tokens_; // token hash -> lease id, active only
};

} // namespace qstack
