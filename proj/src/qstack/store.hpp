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
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/records.hpp"

struct sqlite3;

namespace qstack {

struct JobFilter {
    std::optional<std::string> owner = std::nullopt;
    std::optional<JobStatus> status = std::nullopt;
    std::optional<std::string> device_id = std::nullopt;
    std::optional<std::string> session_id = std::nullopt;
    std::size_t limit = 0; // 0 = unlimited
};

/// Embedded durable store (SQLite, WAL journal, full fsync). Each record is kept as its
/// JSON form next to the columns used for lookup. All methods are thread-safe.
class Store {
public:
    /// ":memory:" gives a private in-memory database. Throws Storage.
    explicit Store(const std::string& path);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Runs `fn` inside one write transaction; rolls back if it throws.
    void transaction(const std::function<void()>& fn);

    void put_job(const Job& job);
    [[nodiscard]] std::optional<Job> job(const std::string& id) const;
    /// Ordered by submission (queue_seq, then id).
    [[nodiscard]] std::vector<Job> jobs(const JobFilter& filter = {}) const;
    [[nodiscard]] std::optional<Job> queue_head(const std::string& device_id) const;
    [[nodiscard]] std::int64_t next_queue_seq();

    void put_user(const User& user);
    [[nodiscard]] std::optional<User> user(const std::string& id) const;
    [[nodiscard]] std::vector<User> users() const;

    void put_apikey(const ApiKey& key);
    [[nodiscard]] std::optional<ApiKey> apikey(const std::string& id) const;
    [[nodiscard]] std::optional<ApiKey> apikey_by_hash(const std::string& hash) const;
    [[nodiscard]] std::vector<ApiKey> apikeys(const std::string& owner) const;

    void put_device(const DeviceRecord& device);
    [[nodiscard]] std::optional<DeviceRecord> device(const std::string& id) const;
    [[nodiscard]] std::vector<DeviceRecord> devices() const;
    void delete_device(const std::string& id);

    void put_session(const SessionLease& lease);
    [[nodiscard]] std::optional<SessionLease> session(const std::string& id) const;
    [[nodiscard]] std::optional<SessionLease> session_by_token_hash(const std::string& hash) const;
    [[nodiscard]] std::vector<SessionLease> sessions() const;

    /// Assigns `seq`.
    std::int64_t append_exec(ExecRecord record);
    void finish_exec(std::int64_t seq, const std::string& ended_at);
    [[nodiscard]] std::vector<ExecRecord> exec_log(const std::optional<std::string>& device_id = {}) const;

    /// Every table, every row, in key order.
    [[nodiscard]] nlohmann::json dump() const;

private:
    class Statement;

    void exec(const std::string& sql) const;
    [[nodiscard]] std::vector<nlohmann::json> query_json(const std::string& sql,
                                                         const std::vector<std::string>& args) const;

    sqlite3* db_ = nullptr;
    mutable std::recursive_mutex mutex_;
};

} // namespace qstack
