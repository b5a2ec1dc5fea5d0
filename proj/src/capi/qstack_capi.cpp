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

#include "qstack/qstack.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "qstack/device.hpp"
#include "qstack/errors.hpp"
#include "qstack/estimation.hpp"
#include "qstack/observable.hpp"
#include "qstack/qasm.hpp"
#include "qstack/server.hpp"
#include "qstack/simulator.hpp"
#include "qstack/transpiler.hpp"

struct qs_circuit {
    qstack::QuantumCircuit circuit;
};

struct qs_device {
    qstack::DeviceSpec spec;
};

struct qs_server {
    std::unique_ptr<qstack::Server> server;
};

namespace {

using nlohmann::json;
using qstack::ErrorCode;

static_assert(QS_E_INVALID_ARGUMENT == static_cast<int>(ErrorCode::InvalidArgument));
static_assert(QS_E_VALIDATION_FAILED == static_cast<int>(ErrorCode::ValidationFailed));
static_assert(QS_E_UNAUTHORIZED == static_cast<int>(ErrorCode::Unauthorized));
static_assert(QS_E_INTERNAL == static_cast<int>(ErrorCode::Internal));

thread_local std::string last_error;

template <typename F>
qs_status guarded(F&& body) noexcept {
    try {
        body();
        last_error.clear();
        return QS_OK;
    } catch (const qstack::QasmError& e) {
        last_error = std::string(e.what()) + " (line " + std::to_string(e.line()) + ", column " +
                     std::to_string(e.column()) + ")";
        return static_cast<qs_status>(e.code());
    } catch (const qstack::Error& e) {
        last_error = e.what();
        return static_cast<qs_status>(e.code());
    } catch (const json::exception& e) {
        last_error = e.what();
        return QS_E_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        last_error = e.what();
        return QS_E_INTERNAL;
    } catch (...) {
        last_error = "unknown failure";
        return QS_E_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) {
        qstack::raise(ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
    }
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const qstack::TranspilerRegistry& local_registry() {
    static const qstack::TranspilerRegistry registry;
    return registry;
}

} // namespace

extern "C" {

const char* qs_version(void) { return "0.1.0"; }

const char* qs_last_error(void) { return last_error.c_str(); }

const char* qs_status_name(qs_status status) {
    if (status == QS_OK) {
        return "OK";
    }
    if (status < QS_E_INVALID_ARGUMENT || status > QS_E_INTERNAL) {
        return "Unknown";
    }
    return qstack::to_string(static_cast<ErrorCode>(status)).data();
}

void qs_string_free(char* s) { std::free(s); }

qs_status qs_circuit_parse(const char* qasm, qs_circuit** out) {
    return guarded([&] {
        require(qasm, "qasm");
        require(out, "out");
        *out = new qs_circuit{qstack::parse_qasm(qasm)};
    });
}

qs_status qs_circuit_emit(const qs_circuit* circuit, char** out) {
    return guarded([&] {
        require(circuit, "circuit");
        require(out, "out");
        *out = dup_string(qstack::emit_qasm(circuit->circuit));
    });
}

int qs_circuit_num_qubits(const qs_circuit* circuit) { return circuit ? circuit->circuit.n_qubits() : -1; }

int qs_circuit_num_clbits(const qs_circuit* circuit) { return circuit ? circuit->circuit.n_clbits() : -1; }

int qs_circuit_num_gates(const qs_circuit* circuit) {
    return circuit ? static_cast<int>(circuit->circuit.gates().size()) : -1;
}

void qs_circuit_free(qs_circuit* circuit) { delete circuit; }

qs_status qs_operator_normalize(const char* operator_json, char** out) {
    return guarded([&] {
        require(operator_json, "operator_json");
        require(out, "out");
        const auto obs = qstack::operator_from_json(json::parse(operator_json));
        json pairs = json::array();
        for (const auto& [label, coeff] : qstack::operator_pairs(obs)) {
            pairs.push_back(json::array({label, coeff}));
        }
        *out = dup_string(pairs.dump());
    });
}

qs_status qs_device_from_json(const char* device_json, qs_device** out) {
    return guarded([&] {
        require(device_json, "device_json");
        require(out, "out");
        *out = new qs_device{qstack::device_from_json(json::parse(device_json))};
    });
}

qs_status qs_device_simple(const char* id, int n_qubits, qs_device** out) {
    return guarded([&] {
        require(id, "id");
        require(out, "out");
        auto spec = qstack::DeviceSpec::simple(id, n_qubits);
        spec.validate();
        *out = new qs_device{std::move(spec)};
    });
}

qs_status qs_device_to_json(const qs_device* device, char** out) {
    return guarded([&] {
        require(device, "device");
        require(out, "out");
        *out = dup_string(qstack::device_to_json(device->spec).dump());
    });
}

void qs_device_free(qs_device* device) { delete device; }

qs_status qs_transpile(const qs_circuit* circuit, const qs_device* device, const char* transpiler,
                       const char* options_json, char** result_json) {
    return guarded([&] {
        require(circuit, "circuit");
        require(device, "device");
        require(result_json, "result_json");
        const json request{
            {"qasm", qstack::emit_qasm(circuit->circuit)},
            {"device_json", qstack::device_to_json(device->spec)},
            {"transpiler_name", transpiler ? transpiler : "default"},
            {"options", options_json ? json::parse(options_json) : json::object()},
        };
        *result_json = dup_string(qstack::handle_transpile_request(local_registry(), request).dump());
    });
}

qs_status qs_sample(const qs_circuit* circuit, const qs_device* device, uint64_t shots, uint64_t seed, int noise,
                    char** counts_json) {
    return guarded([&] {
        require(circuit, "circuit");
        require(counts_json, "counts_json");
        const auto spec =
            device ? device->spec : qstack::DeviceSpec::simple("local", circuit->circuit.n_qubits());
        qstack::SampleOptions opts;
        opts.noise = noise != 0;
        *counts_json = dup_string(qstack::sample(circuit->circuit, shots, seed, spec, opts).to_json().dump());
    });
}

qs_status qs_estimate(const qs_circuit* circuit, const char* operator_json, const qs_device* device, uint64_t shots,
                      uint64_t seed, char** result_json) {
    return guarded([&] {
        require(circuit, "circuit");
        require(operator_json, "operator_json");
        require(result_json, "result_json");
        const auto obs = qstack::operator_from_json(json::parse(operator_json));
        const auto spec =
            device ? device->spec : qstack::DeviceSpec::simple("local", circuit->circuit.n_qubits());
        const auto r = qstack::estimate(circuit->circuit, obs, shots, spec, seed, local_registry());
        *result_json = dup_string(r.to_json().dump());
    });
}

qs_status qs_server_create(const char* config_json, qs_server** out) {
    return guarded([&] {
        require(out, "out");
        const json j = config_json ? json::parse(config_json) : json::object();
        qstack::ServerConfig cfg;
        cfg.db_path = j.value("db_path", cfg.db_path);
        cfg.host = j.value("host", cfg.host);
        cfg.port = j.value("port", cfg.port);
        cfg.devices_dir = j.value("devices_dir", cfg.devices_dir);
        cfg.program_dir = j.value("program_dir", cfg.program_dir);
        cfg.bootstrap_admin_key = j.value("admin_key", cfg.bootstrap_admin_key);
        cfg.program_timeout = std::chrono::seconds(j.value("program_timeout_s", cfg.program_timeout.count()));
        cfg.default_ttl_seconds = j.value("default_ttl_s", cfg.default_ttl_seconds);
        cfg.http_threads = j.value("http_threads", cfg.http_threads);
        for (const auto& r : j.value("remote_transpilers", json::array())) {
            cfg.remote_transpilers.push_back({r.at("name").get<std::string>(), r.at("url").get<std::string>(),
                                              r.value("api_key", std::string{}),
                                              r.value("remote_name", std::string{"default"})});
        }
        *out = new qs_server{std::make_unique<qstack::Server>(std::move(cfg))};
    });
}

qs_status qs_server_start(qs_server* server, int* port) {
    return guarded([&] {
        require(server, "server");
        const int p = server->server->start_background();
        if (port != nullptr) {
            *port = p;
        }
    });
}

qs_status qs_server_bootstrap_key(const qs_server* server, char** out) {
    return guarded([&] {
        require(server, "server");
        require(out, "out");
        *out = dup_string(server->server->bootstrap_key());
    });
}

qs_status qs_server_base_url(const qs_server* server, char** out) {
    return guarded([&] {
        require(server, "server");
        require(out, "out");
        *out = dup_string(server->server->base_url());
    });
}

qs_status qs_server_stop(qs_server* server) {
    return guarded([&] {
        require(server, "server");
        server->server->stop();
    });
}

void qs_server_free(qs_server* server) { delete server; }

} // extern "C"
