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

#include "qstack/store.hpp"

#include <sqlite3.h>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

class Store::Statement {
public:
    Statement(sqlite3* db, const std::string& sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
            raise(ErrorCode::Storage, fmt::format("prepare failed: {}", sqlite3_errmsg(db)));
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int idx, const std::string& v) {
        check(sqlite3_bind_text(stmt_, idx, v.c_str(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int idx, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_, idx, v));
        return *this;
    }
    Statement& bind_null(int idx) {
        check(sqlite3_bind_null(stmt_, idx));
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) {
            return true;
        }
        if (rc != SQLITE_DONE) {
            raise(ErrorCode::Storage, fmt::format("step failed: {}", sqlite3_errmsg(db_)));
        }
        return false;
    }

    std::string text(int col) const {
        const auto* p = sqlite3_column_text(stmt_, col);
        return p ? std::string(reinterpret_cast<const char*>(p), static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
                 : std::string{};
    }
    std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }

private:
    void check(int rc) const {
        if (rc != SQLITE_OK) {
            raise(ErrorCode::Storage, fmt::format("bind failed: {}", sqlite3_errmsg(db_)));
        }
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

namespace {

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS jobs (
  id TEXT PRIMARY KEY,
  owner TEXT NOT NULL,
  device_id TEXT NOT NULL,
  status TEXT NOT NULL,
  session_id TEXT NOT NULL,
  queue_seq INTEGER NOT NULL,
  data TEXT NOT NULL);
CREATE INDEX IF NOT EXISTS jobs_queue ON jobs(device_id, status, queue_seq);
CREATE INDEX IF NOT EXISTS jobs_owner ON jobs(owner);
CREATE TABLE IF NOT EXISTS users (id TEXT PRIMARY KEY, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS apikeys (
  id TEXT PRIMARY KEY,
  hash TEXT NOT NULL UNIQUE,
  owner TEXT NOT NULL,
  data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS devices (id TEXT PRIMARY KEY, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS sessions (
  id TEXT PRIMARY KEY,
  token_hash TEXT NOT NULL,
  data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS exec_log (
  seq INTEGER PRIMARY KEY AUTOINCREMENT,
  job_id TEXT NOT NULL,
  device_id TEXT NOT NULL,
  session_id TEXT NOT NULL,
  started_at TEXT NOT NULL,
  ended_at TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS counters (name TEXT PRIMARY KEY, value INTEGER NOT NULL);
)sql";

template <typename T, typename F>
std::optional<T> first(std::vector<nlohmann::json> rows, F convert) {
    if (rows.empty()) {
        return std::nullopt;
    }
    return convert(rows.front());
}

template <typename T, typename F>
std::vector<T> all(const std::vector<nlohmann::json>& rows, F convert) {
    std::vector<T> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(convert(r));
    }
    return out;
}

} // namespace

Store::Store(const std::string& path) {
    if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        raise(ErrorCode::Storage, fmt::format("cannot open store '{}': {}", path, msg));
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL;");
    exec("PRAGMA synchronous=FULL;");
    exec(kSchema);
}

Store::~Store() { sqlite3_close(db_); }

void Store::exec(const std::string& sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        raise(ErrorCode::Storage, msg);
    }
}

void Store::transaction(const std::function<void()>& fn) {
    std::lock_guard lock(mutex_);
    exec("BEGIN IMMEDIATE;");
    try {
        fn();
        exec("COMMIT;");
    } catch (...) {
        char* err = nullptr;
        sqlite3_exec(db_, "ROLLBACK;", nullptr, nullptr, &err);
        sqlite3_free(err);
        throw;
    }
}

std::vector<nlohmann::json> Store::query_json(const std::string& sql, const std::vector<std::string>& args) const {
    std::lock_guard lock(mutex_);
    Statement st(db_, sql);
    for (std::size_t i = 0; i < args.size(); ++i) {
        st.bind(static_cast<int>(i + 1), args[i]);
    }
    std::vector<nlohmann::json> rows;
    while (st.step()) {
        rows.push_back(nlohmann::json::parse(st.text(0)));
    }
    return rows;
}

void Store::put_job(const Job& job) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT OR REPLACE INTO jobs(id, owner, device_id, status, session_id, queue_seq, data) "
                      "VALUES(?, ?, ?, ?, ?, ?, ?)");
    st.bind(1, job.id)
        .bind(2, job.owner)
        .bind(3, job.device_id)
        .bind(4, std::string(to_string(job.status)))
        .bind(5, job.session_id)
        .bind(6, job.queue_seq)
        .bind(7, job.to_json().dump());
    st.step();
}

std::optional<Job> Store::job(const std::string& id) const {
    return first<Job>(query_json("SELECT data FROM jobs WHERE id = ?", {id}), Job::from_json);
}

std::vector<Job> Store::jobs(const JobFilter& filter) const {
    std::string sql = "SELECT data FROM jobs WHERE 1=1";
    std::vector<std::string> args;
    if (filter.owner) {
        sql += " AND owner = ?";
        args.push_back(*filter.owner);
    }
    if (filter.status) {
        sql += " AND status = ?";
        args.emplace_back(to_string(*filter.status));
    }
    if (filter.device_id) {
        sql += " AND device_id = ?";
        args.push_back(*filter.device_id);
    }
    if (filter.session_id) {
        sql += " AND session_id = ?";
        args.push_back(*filter.session_id);
    }
    sql += " ORDER BY queue_seq, id";
    if (filter.limit > 0) {
        sql += fmt::format(" LIMIT {}", filter.limit);
    }
    return all<Job>(query_json(sql, args), Job::from_json);
}

std::optional<Job> Store::queue_head(const std::string& device_id) const {
    return first<Job>(query_json("SELECT data FROM jobs WHERE device_id = ? AND status = 'queued' "
                                 "ORDER BY queue_seq LIMIT 1",
                                 {device_id}),
                      Job::from_json);
}

std::int64_t Store::next_queue_seq() {
    std::lock_guard lock(mutex_);
    exec("INSERT OR IGNORE INTO counters(name, value) VALUES('queue_seq', 0);");
    exec("UPDATE counters SET value = value + 1 WHERE name = 'queue_seq';");
    Statement st(db_, "SELECT value FROM counters WHERE name = 'queue_seq'");
    st.step();
    return st.int64(0);
}

void Store::put_user(const User& user) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT OR REPLACE INTO users(id, data) VALUES(?, ?)");
    st.bind(1, user.id).bind(2, user.to_json().dump());
    st.step();
}

std::optional<User> Store::user(const std::string& id) const {
    return first<User>(query_json("SELECT data FROM users WHERE id = ?", {id}), User::from_json);
}

std::vector<User> Store::users() const {
    return all<User>(query_json("SELECT data FROM users ORDER BY id", {}), User::from_json);
}

void Store::put_apikey(const ApiKey& key) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT OR REPLACE INTO apikeys(id, hash, owner, data) VALUES(?, ?, ?, ?)");
    st.bind(1, key.id).bind(2, key.hash).bind(3, key.owner).bind(4, key.to_record().dump());
    st.step();
}

std::optional<ApiKey> Store::apikey(const std::string& id) const {
    return first<ApiKey>(query_json("SELECT data FROM apikeys WHERE id = ?", {id}), ApiKey::from_record);
}

std::optional<ApiKey> Store::apikey_by_hash(const std::string& hash) const {
    return first<ApiKey>(query_json("SELECT data FROM apikeys WHERE hash = ?", {hash}), ApiKey::from_record);
}

std::vector<ApiKey> Store::apikeys(const std::string& owner) const {
    return all<ApiKey>(query_json("SELECT data FROM apikeys WHERE owner = ? ORDER BY id", {owner}),
                       ApiKey::from_record);
}

void Store::put_device(const DeviceRecord& device) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT OR REPLACE INTO devices(id, data) VALUES(?, ?)");
    st.bind(1, device.spec.id).bind(2, device.to_json().dump());
    st.step();
}

std::optional<DeviceRecord> Store::device(const std::string& id) const {
    return first<DeviceRecord>(query_json("SELECT data FROM devices WHERE id = ?", {id}), DeviceRecord::from_json);
}

std::vector<DeviceRecord> Store::devices() const {
    return all<DeviceRecord>(query_json("SELECT data FROM devices ORDER BY id", {}), DeviceRecord::from_json);
}

void Store::delete_device(const std::string& id) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "DELETE FROM devices WHERE id = ?");
    st.bind(1, id);
    st.step();
}

void Store::put_session(const SessionLease& lease) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT OR REPLACE INTO sessions(id, token_hash, data) VALUES(?, ?, ?)");
    st.bind(1, lease.id).bind(2, lease.token_hash).bind(3, lease.to_record().dump());
    st.step();
}

std::optional<SessionLease> Store::session(const std::string& id) const {
    return first<SessionLease>(query_json("SELECT data FROM sessions WHERE id = ?", {id}),
                               SessionLease::from_record);
}

std::optional<SessionLease> Store::session_by_token_hash(const std::string& hash) const {
    return first<SessionLease>(query_json("SELECT data FROM sessions WHERE token_hash = ?", {hash}),
                               SessionLease::from_record);
}

std::vector<SessionLease> Store::sessions() const {
    return all<SessionLease>(query_json("SELECT data FROM sessions ORDER BY id", {}), SessionLease::from_record);
}

std::int64_t Store::append_exec(ExecRecord record) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "INSERT INTO exec_log(job_id, device_id, session_id, started_at, ended_at) "
                      "VALUES(?, ?, ?, ?, ?)");
    st.bind(1, record.job_id)
        .bind(2, record.device_id)
        .bind(3, record.session_id)
        .bind(4, record.started_at)
        .bind(5, record.ended_at);
    st.step();
    return sqlite3_last_insert_rowid(db_);
}

void Store::finish_exec(std::int64_t seq, const std::string& ended_at) {
    std::lock_guard lock(mutex_);
    Statement st(db_, "UPDATE exec_log SET ended_at = ? WHERE seq = ?");
    st.bind(1, ended_at).bind(2, seq);
    st.step();
}

std::vector<ExecRecord> Store::exec_log(const std::optional<std::string>& device_id) const {
    std::lock_guard lock(mutex_);
    std::string sql = "SELECT seq, job_id, device_id, session_id, started_at, ended_at FROM exec_log";
    if (device_id) {
        sql += " WHERE device_id = ?";
    }
    sql += " ORDER BY seq";
    Statement st(db_, sql);
    if (device_id) {
        st.bind(1, *device_id);
    }
    std::vector<ExecRecord> out;
    while (st.step()) {
        out.push_back({st.int64(0), st.text(1), st.text(2), st.text(3), st.text(4), st.text(5)});
    }
    return out;
}

nlohmann::json Store::dump() const {
    std::lock_guard lock(mutex_);
    nlohmann::json out = nlohmann::json::object();
    const std::pair<const char*, const char*> tables[] = {
        {"jobs", "SELECT data FROM jobs ORDER BY id"},         {"users", "SELECT data FROM users ORDER BY id"},
        {"apikeys", "SELECT data FROM apikeys ORDER BY id"},   {"devices", "SELECT data FROM devices ORDER BY id"},
        {"sessions", "SELECT data FROM sessions ORDER BY id"},
    };
    for (const auto& [name, sql] : tables) {
        out[name] = query_json(sql, {});
    }
    nlohmann::json log = nlohmann::json::array();
    for (const auto& r : exec_log()) {
        log.push_back(r.to_json());
    }
    out["exec_log"] = std::move(log);
    return out;
}

} // namespace qstack
