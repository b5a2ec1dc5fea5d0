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

#include <httplib.h>

#include <fmt/format.h>

#include "qstack/errors.hpp"
#include "qstack/qasm.hpp"
#include "qstack/transpiler.hpp"

namespace qstack {

namespace {

DeviceSpec device_field(const nlohmann::json& request) {
    const auto& d = request.at("device_json");
    return device_from_json(d.is_string() ? nlohmann::json::parse(d.get<std::string>()) : d);
}

} // namespace

nlohmann::json handle_transpile_request(const TranspilerRegistry& registry, const nlohmann::json& request) {
    if (!request.is_object() || !request.contains("qasm") || !request.contains("device_json")) {
        raise(ErrorCode::InvalidArgument, "transpile request needs 'qasm' and 'device_json'");
    }
    const auto circuit = parse_qasm(request.at("qasm").get<std::string>());
    const auto device = device_field(request);
    const auto name = request.value("transpiler_name", std::string("default"));
    const auto options = TranspileOptions::from_json(request.value("options", nlohmann::json::object()));
    const auto r = registry.transpile(circuit, device, name, options);
    return {
        {"qasm", emit_qasm(r.circuit)},
        {"initial_layout", r.initial_layout},
        {"final_layout", r.final_layout},
        {"metrics", metrics_to_json(r.metrics)},
        {"transpiler_name", r.transpiler_name},
    };
}

Transpiler remote_transpiler(std::string base_url, std::string api_key, std::string remote_name) {
    return [base_url = std::move(base_url), api_key = std::move(api_key), remote_name = std::move(remote_name)](
               const QuantumCircuit& circuit, const DeviceSpec& device, const TranspileOptions& options) {
        httplib::Client cli(base_url);
        cli.set_connection_timeout(5);
        cli.set_read_timeout(60);
        const nlohmann::json req{
            {"qasm", emit_qasm(circuit)},
            {"device_json", device_to_json(device)},
            {"transpiler_name", remote_name},
            {"options", options.to_json()},
        };
        httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
        auto res = cli.Post("/transpile", headers, req.dump(), "application/json");
        if (!res) {
            raise(ErrorCode::Internal, fmt::format("transpile service at {} unreachable: {}", base_url,
                                                   httplib::to_string(res.error())));
        }
        if (res->status != 200) {
            raise(ErrorCode::Internal, fmt::format("transpile service returned {}: {}", res->status, res->body));
        }
        const auto body = nlohmann::json::parse(res->body);
        TranspileResult r;
        r.circuit = parse_qasm(body.at("qasm").get<std::string>());
        r.initial_layout = body.at("initial_layout").get<std::vector<int>>();
        r.final_layout = body.at("final_layout").get<std::vector<int>>();
        r.metrics = circuit_metrics(r.circuit);
        r.transpiler_name = body.value("transpiler_name", remote_name);
        return r;
    };
}

} // namespace qstack
