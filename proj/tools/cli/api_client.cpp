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

#include "api_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

namespace qstack::cli {

namespace {

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

nlohmann::json load_config_file(const std::string& explicit_path) {
    std::string path = explicit_path;
    if (path.empty()) {
        path = env_or_empty("QSTACK_CONFIG");
    }
    if (path.empty()) {
        const auto home = env_or_empty("HOME");
        if (home.empty()) {
            return nlohmann::json::object();
        }
        path = home + "/.config/qstack/config.json";
        if (!std::filesystem::exists(path)) {
            return nlohmann::json::object();
        }
    }
    std::ifstream in(path);
    if (!in) {
        throw CliExit(kUsage, fmt::format("cannot read config file {}", path));
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (!j.is_object()) {
        throw CliExit(kUsage, fmt::format("config file {} is not a JSON object", path));
    }
    return j;
}

} // namespace

ClientConfig resolve_config(const std::string& flag_url, const std::string& flag_key, const std::string& config_path) {
    const auto file = load_config_file(config_path);
    ClientConfig c;
    c.url = !flag_url.empty() ? flag_url : env_or_empty("QSTACK_URL");
    if (c.url.empty()) {
        c.url = file.value("url", std::string{"http://127.0.0.1:8080"});
    }
    c.api_key = !flag_key.empty() ? flag_key : env_or_empty("QSTACK_API_KEY");
    if (c.api_key.empty()) {
        c.api_key = file.value("api_key", std::string{});
    }
    while (!c.url.empty() && c.url.back() == '/') {
        c.url.pop_back();
    }
    return c;
}

std::string encode_query(const std::string& value) { return httplib::detail::encode_query_param(value); }

std::string humanize(const std::string& error_code) {
    std::string out;
    for (char ch : error_code) {
        if (std::isupper(static_cast<unsigned char>(ch)) && !out.empty()) {
            out += ' ';
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return out;
}

ApiResponse ApiClient::request(const std::string& method, const std::string& path, const nlohmann::json& body) const {
    httplib::Client cli(config_.url);
    cli.set_connection_timeout(5);
    cli.set_read_timeout(300);
    httplib::Headers headers;
    if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
    }
    const std::string payload = body.is_null() ? std::string{} : body.dump();
    httplib::Result res;
    if (method == "GET") {
        res = cli.Get(path, headers);
    } else if (method == "POST") {
        res = cli.Post(path, headers, payload, "application/json");
    } else if (method == "PATCH") {
        res = cli.Patch(path, headers, payload, "application/json");
    } else if (method == "DELETE") {
        res = cli.Delete(path, headers);
    } else {
        throw CliExit(kUsage, fmt::format("unsupported method {}", method));
    }
    if (!res) {
        throw CliExit(kNetwork, fmt::format("cannot reach {}: {}", config_.url, httplib::to_string(res.error())));
    }
    ApiResponse out{res->status, res->body, nlohmann::json::parse(res->body, nullptr, false)};
    if (out.status < 400) {
        return out;
    }
    const auto code = out.json.is_object() ? out.json.value("error", std::string{"Error"}) : std::string{"Error"};
    const auto message = out.json.is_object() ? out.json.value("message", out.body) : out.body;
    auto text = fmt::format("{}: {}", humanize(code), message);
    if (out.json.is_object() && out.json.contains("job_id")) {
        text += fmt::format(" (job {})", out.json.at("job_id").get<std::string>());
    }
    if (out.status == 401 || out.status == 403) {
        throw CliExit(kNetwork, text);
    }
    throw CliExit(out.status == 400 ? kUsage : kJobFailed, text);
}

ApiResponse ApiClient::wait_job(const std::string& job_id) const {
    auto delay = std::chrono::milliseconds(500);
    for (;;) {
        auto r = request("GET", "/jobs/" + job_id);
        const auto status = r.json.value("status", std::string{});
        if (status == "succeeded" || status == "failed" || status == "cancelled") {
            return r;
        }
        std::this_thread::sleep_for(delay);
        delay = std::min(std::chrono::milliseconds(5000), delay * 3 / 2);
    }
}

} // namespace qstack::cli
