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

// Hybrid loop run inside a session: sample a one-qubit circuit, then move the rz
// angle toward P(1) = 0.5. Talks to the session through SESSION_URL / SESSION_TOKEN.

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;

struct Endpoint {
    std::string origin; // scheme://host:port
    std::string path;   // /sessions/{id}
};

Endpoint split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

json call(httplib::Client& cli, const httplib::Headers& headers, const std::string& method, const std::string& path,
          const json& body = nullptr) {
    auto res = method == "GET" ? cli.Get(path, headers) : cli.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw std::runtime_error(fmt::format("{} {}: {}", method, path, httplib::to_string(res.error())));
    }
    if (res->status >= 300) {
        throw std::runtime_error(fmt::format("{} {} returned {}: {}", method, path, res->status, res->body));
    }
    return json::parse(res->body);
}

std::string circuit(double theta) {
    return fmt::format("OPENQASM 3;\ninclude \"stdgates.inc\";\nqubit[1] q;\nbit[1] c;\nh q[0];\nrz({:.17g}) q[0];\n"
                       "h q[0];\nc[0] = measure q[0];\n",
                       theta);
}

} // namespace

int main(int argc, char** argv) {
    const char* url = std::getenv("SESSION_URL");
    const char* token = std::getenv("SESSION_TOKEN");
    if (url == nullptr || token == nullptr) {
        std::cerr << "SESSION_URL and SESSION_TOKEN must be set\n";
        return 2;
    }
    const int iterations = argc > 1 ? std::atoi(argv[1]) : 3;
    const std::uint64_t shots = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1000;
    try {
        const auto ep = split_url(url);
        httplib::Client cli(ep.origin);
        cli.set_read_timeout(120);
        const httplib::Headers headers{{"Authorization", std::string("Bearer ") + token}};
        const auto lease = call(cli, headers, "GET", ep.path);
        std::cout << fmt::format("session {} on {}\n", lease.at("id").get<std::string>(),
                                 lease.at("device_id").get<std::string>());

        double theta = 0.3;
        constexpr double target = 0.5;
        constexpr double rate = 2.0;
        for (int i = 0; i < iterations; ++i) {
            const json draft{{"job_type", "sampling"},
                             {"name", fmt::format("hybrid-{}", i)},
                             {"shots", shots},
                             {"payload", {{"qasm", circuit(theta)}}},
                             {"options", {{"seed", 1000 + i}}}};
            const auto job = call(cli, headers, "POST", ep.path + "/jobs", draft);
            if (job.at("status") != "succeeded") {
                throw std::runtime_error(fmt::format("sub-job {} {}: {}", job.at("id").get<std::string>(),
                                                     job.at("status").get<std::string>(),
                                                     job.value("error_message", std::string{})));
            }
            const auto& counts = job.at("result").at("counts");
            const double ones = counts.value("1", 0.0);
            const double p1 = ones / static_cast<double>(shots);
            std::cout << fmt::format("iteration {} theta={:.6f} p1={:.4f} job={}\n", i, theta, p1,
                                     job.at("id").get<std::string>());
            theta += rate * (target - p1);
        }
        std::cout << fmt::format("final theta={:.6f}\n", theta);
    } catch (const std::exception& e) {
        std::cerr << "hybrid demo failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
