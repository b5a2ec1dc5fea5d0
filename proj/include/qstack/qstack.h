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

/* qstack C API: circuits, devices, local transpile/simulate/estimate, and the
 * embedded cloud server, behind opaque handles and integer status codes.
 *
 * Conventions:
 *   - Every fallible function returns a qs_status. QS_OK is 0; any other value is
 *     one of the QS_E_* codes and qs_last_error() holds a message for the calling thread.
 *   - Strings returned through `char** out` are heap allocated; release them with
 *     qs_string_free(). Handles are released with their *_free function.
 *   - JSON shapes match the HTTP API.
 */
#ifndef QSTACK_QSTACK_H
#define QSTACK_QSTACK_H

#include <stdint.h>

#if defined(_WIN32)
#define QS_API __declspec(dllexport)
#else
#define QS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int qs_status;

enum {
    QS_OK = 0,
    QS_E_INVALID_ARGUMENT = 1,
    QS_E_SYNTAX_ERROR,
    QS_E_UNSUPPORTED_CONSTRUCT,
    QS_E_INDEX_OUT_OF_RANGE,
    QS_E_INVALID_CIRCUIT,
    QS_E_MALFORMED_LABEL,
    QS_E_DUPLICATE_QUBIT_IN_LABEL,
    QS_E_TOO_MANY_QUBITS,
    QS_E_MEASURE_IN_STATEVECTOR_PATH,
    QS_E_NO_MEASUREMENTS,
    QS_E_DEVICE_MISMATCH,
    QS_E_ZERO_SHOTS,
    QS_E_INVALID_DEVICE,
    QS_E_DUPLICATE_NAME,
    QS_E_UNKNOWN_TRANSPILER,
    QS_E_CIRCUIT_TOO_LARGE,
    QS_E_ROUTING_FAILURE,
    QS_E_NON_CONFORMANT_CIRCUIT,
    QS_E_UNSUPPORTED_BASIS,
    QS_E_ALL_TRANSPILERS_FAILED,
    QS_E_INSUFFICIENT_QUBITS,
    QS_E_NO_CONNECTED_REGION,
    QS_E_KEY_LENGTH_MISMATCH,
    QS_E_SINGULAR_CONFUSION_MATRIX,
    QS_E_DIMENSION_MISMATCH,
    QS_E_TOO_MANY_MEASURED_QUBITS,
    QS_E_BASE_CIRCUIT_HAS_MEASUREMENTS,
    QS_E_UNMEASURED_SUPPORT_QUBIT,
    QS_E_INSUFFICIENT_SHOTS,
    QS_E_VALIDATION_FAILED,
    QS_E_UNKNOWN_DEVICE,
    QS_E_DEVICE_UNAVAILABLE,
    QS_E_NOT_CANCELLABLE,
    QS_E_NOT_FOUND,
    QS_E_FORBIDDEN,
    QS_E_LEASE_CONFLICT,
    QS_E_LEASE_EXPIRED,
    QS_E_LEASE_NOT_ACTIVE,
    QS_E_FORBIDDEN_SUB_JOB_TYPE,
    QS_E_SPAWN_FAILURE,
    QS_E_WALL_CLOCK_TIMEOUT,
    QS_E_UNAUTHORIZED,
    QS_E_DEVICE_BUSY,
    QS_E_CONFLICT,
    QS_E_STORAGE,
    QS_E_INTERNAL
};

typedef struct qs_circuit qs_circuit;
typedef struct qs_device qs_device;
typedef struct qs_server qs_server;

/* Library */
QS_API const char* qs_version(void);
/* Message of the last failing call on this thread; "" after success. */
QS_API const char* qs_last_error(void);
/* Stable name of a status code, e.g. "SyntaxError". */
QS_API const char* qs_status_name(qs_status status);
QS_API void qs_string_free(char* s);

/* Circuits */
QS_API qs_status qs_circuit_parse(const char* qasm, qs_circuit** out);
/* Canonical OpenQASM text. */
QS_API qs_status qs_circuit_emit(const qs_circuit* circuit, char** out);
QS_API int qs_circuit_num_qubits(const qs_circuit* circuit);
QS_API int qs_circuit_num_clbits(const qs_circuit* circuit);
QS_API int qs_circuit_num_gates(const qs_circuit* circuit);
QS_API void qs_circuit_free(qs_circuit* circuit);

/* Observables: validates a `[[label, coeff], ...]` document and writes its canonical form. */
QS_API qs_status qs_operator_normalize(const char* operator_json, char** out);

/* Devices */
QS_API qs_status qs_device_from_json(const char* device_json, qs_device** out);
/* Linear topology, basis {rz, sx, x, cx}, noiseless. */
QS_API qs_status qs_device_simple(const char* id, int n_qubits, qs_device** out);
QS_API qs_status qs_device_to_json(const qs_device* device, char** out);
QS_API void qs_device_free(qs_device* device);

/* Local execution. `transpiler` may be NULL for "default"; `options_json` may be NULL. */
QS_API qs_status qs_transpile(const qs_circuit* circuit, const qs_device* device, const char* transpiler,
                              const char* options_json, char** result_json);
/* Counts JSON `{bitstring: count}` with clbit 0 as the rightmost character.
 * `noise` != 0 injects the device readout errors. */
QS_API qs_status qs_sample(const qs_circuit* circuit, const qs_device* device, uint64_t shots, uint64_t seed,
                           int noise, char** counts_json);
/* Expectation value of a measure-free circuit; result JSON as in estimation job results. */
QS_API qs_status qs_estimate(const qs_circuit* circuit, const char* operator_json, const qs_device* device,
                             uint64_t shots, uint64_t seed, char** result_json);

/* Embedded cloud server.
 * config_json keys (all optional): db_path, host, port (0 = any free port), devices_dir,
 * program_dir, admin_key, program_timeout_s, default_ttl_s, http_threads,
 * remote_transpilers: [{name, url, api_key, remote_name}]. */
QS_API qs_status qs_server_create(const char* config_json, qs_server** out);
/* Binds, starts device workers and serves on a background thread. Writes the bound port. */
QS_API qs_status qs_server_start(qs_server* server, int* port);
/* Admin key generated on first start of an empty store, or "" when none was generated. */
QS_API qs_status qs_server_bootstrap_key(const qs_server* server, char** out);
QS_API qs_status qs_server_base_url(const qs_server* server, char** out);
QS_API qs_status qs_server_stop(qs_server* server);
QS_API void qs_server_free(qs_server* server);

#ifdef __cplusplus
}
#endif

#endif /* QSTACK_QSTACK_H */
