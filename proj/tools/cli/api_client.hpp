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

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace qstack::cli {

enum Exit : int { kOk = 0, kJobFailed = 1, kUsage = 2, kNetwork = 3 };

/// Terminates the command with an exit code and a message for stderr.
class CliExit : public std::runtime_error {
public:
    CliExit(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    [[nodiscard]] int code() const noexcept { return code_; }

private:
    int code_;
};

struct ClientConfig {
    std::string url;
    std::string api_key;
};

/// Resolves url and key: flags, then QSTACK_URL / QSTACK_API_KEY, then the config file.
ClientConfig resolve_config(const std::string& flag_url, const std::string& flag_key, const std::string& config_path);

struct ApiResponse {
    int status = 0;
    std::string body;
    nlohmann::json json;
};

/// Percent-encodes a query parameter value.
std::string encode_query(const std::string& value);

/// "NotCancellable" -> "not cancellable".
std::string humanize(const std::string& error_code);

class ApiClient {
public:
    explicit ApiClient(ClientConfig config) : config_(std::move(config)) {}

    /// Performs the request. Transport failures, 401 and 403 raise CliExit(kNetwork);
    /// other 4xx/5xx raise CliExit(kUsage) for 400 and CliExit(kJobFailed) otherwise.
    ApiResponse request(const std::string& method, const std::string& path,
                        const nlohmann::json& body = nullptr) const;

    /// Polls a job until it is terminal, backing off from 0.5 s to a 5 s cap.
    ApiResponse wait_job(const std::string& job_id) const;

    [[nodiscard]] const ClientConfig& config() const noexcept { return config_; }

private:
    ClientConfig config_;
};

} // namespace qstack::cli
