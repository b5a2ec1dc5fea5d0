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
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstack/engine.hpp"
#include "qstack/records.hpp"
#include "qstack/store.hpp"
#include "qstack/transpiler.hpp"

namespace qstack {

struct RemoteTranspilerConfig {
    std::string name;        // local registry name
    std::string url;         // base URL of another qstack server
    std::string api_key;
    std::string remote_name = "default";
};

struct ServerConfig {
    std::string db_path = "qstack.db";
    std::string host = "127.0.0.1";
    int port = 8080; // 0 picks a free port
    /// Devices to register on first start, one DeviceSpec JSON per *.json file.
    std::string devices_dir;
    std::string program_dir;
    /// Admin key installed when the store has no users. Generated when empty.
    std::string bootstrap_admin_key;
    std::chrono::seconds program_timeout{600};
    std::int64_t default_ttl_seconds = 300;
    int http_threads = 16;
    bool start_workers = true;
    std::vector<RemoteTranspilerConfig> remote_transpilers;
};

/// Maps an error code to its HTTP status.
int http_status(ErrorCode code) noexcept;

/// Cloud API process: durable store, device workers and the HTTP surface.
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket and returns the port. Throws Internal on failure.
    int bind();
    /// Serves until stop(); binds first if needed.
    void listen();
    /// bind() + listen() on a background thread.
    int start_background();
    void stop();

    [[nodiscard]] int port() const noexcept { return port_; }
    [[nodiscard]] std::string base_url() const;
    /// Admin key created during this start, empty if the store already had users.
    [[nodiscard]] const std::string& bootstrap_key() const noexcept { return bootstrap_key_; }

    [[nodiscard]] Engine& engine() noexcept { return *engine_; }
    [[nodiscard]] Store& store() noexcept { return *store_; }
    [[nodiscard]] TranspilerRegistry& registry() noexcept { return registry_; }

    User create_user(const std::string& name, UserRole role);
    /// Returns the record and the plaintext secret (shown once).
    std::pair<ApiKey, std::string> issue_key(const std::string& user_id);
    /// Throws Unauthorized, Forbidden.
    [[nodiscard]] Principal authorize(const std::string& credential) const;

    /// Machine-readable description of every route.
    [[nodiscard]] nlohmann::json openapi() const;

private:
    struct Impl;

    void bootstrap();
    void seed_devices();

    ServerConfig config_;
    TranspilerRegistry registry_;
    std::unique_ptr<Store> store_;
    std::unique_ptr<Engine> engine_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
    bool bound_ = false;
    std::string bootstrap_key_;
};

} // namespace qstack
