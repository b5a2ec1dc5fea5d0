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

// qstack command-line client: job submission and inspection over the HTTP API,
// offline circuit tools and the embedded server through the C API.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <unistd.h>

#include "api_client.hpp"
#include "qstack/qstack.h"
#include "render.hpp"

namespace qstack::cli {
namespace {

using nlohmann::json;

struct Globals {
    std::string url;
    std::string api_key;
    std::string config;
    bool json_out = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CliExit(kUsage, fmt::format("cannot read {}", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check(qs_status status, const std::string& context) {
    if (status != QS_OK) {
        throw CliExit(kUsage, fmt::format("{}: {}: {}", context, qs_status_name(status), qs_last_error()));
    }
}

/// Owns a C string returned by the C API.
struct CString {
    char* p = nullptr;
    ~CString() { qs_string_free(p); }
    [[nodiscard]] std::string str() const { return p ? p : ""; }
};

using CircuitPtr = std::unique_ptr<qs_circuit, decltype(&qs_circuit_free)>;
using DevicePtr = std::unique_ptr<qs_device, decltype(&qs_device_free)>;

CircuitPtr parse_circuit_file(const std::string& path) {
    const auto text = read_file(path);
    qs_circuit* c = nullptr;
    check(qs_circuit_parse(text.c_str(), &c), path);
    return {c, qs_circuit_free};
}

/// Checks a QASM file locally and returns its text.
std::string validated_qasm(const std::string& path) {
    (void)parse_circuit_file(path);
    return read_file(path);
}

json validated_operator(const std::string& path) {
    const auto text = read_file(path);
    CString out;
    check(qs_operator_normalize(text.c_str(), &out.p), path);
    return json::parse(out.str());
}

DevicePtr load_device(const std::string& device_file, int simple_qubits) {
    qs_device* d = nullptr;
    if (!device_file.empty()) {
        check(qs_device_from_json(read_file(device_file).c_str(), &d), device_file);
    } else {
        check(qs_device_simple("local", simple_qubits, &d), "device");
    }
    return {d, qs_device_free};
}

struct SubmitOptions {
    std::string device;
    std::uint64_t shots = 0;
    std::string name;
    std::string description;
    std::string transpiler;
    bool mitigation = false;
    std::optional<std::uint64_t> seed;
    bool wait = false;
};

void add_submit_flags(CLI::App* cmd, SubmitOptions& o, bool with_mitigation) {
    cmd->add_option("--device", o.device, "Target device id")->required();
    cmd->add_option("--shots", o.shots, "Number of shots")->required()->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
    cmd->add_option("--name", o.name, "Job name");
    cmd->add_option("--description", o.description, "Job description");
    cmd->add_option("--transpiler", o.transpiler, "Registered transpiler name");
    if (with_mitigation) {
        cmd->add_flag("--mitigation", o.mitigation, "Apply readout error mitigation");
    }
    cmd->add_option("--seed", o.seed, "Sampling seed");
    cmd->add_flag("--wait", o.wait, "Poll until the job finishes and print the result");
}

json job_body(const std::string& type, const SubmitOptions& o, json payload) {
    json options = json::object();
    if (!o.transpiler.empty()) {
        options["transpiler"] = o.transpiler;
    }
    if (o.mitigation) {
        options["mitigation"] = true;
    }
    if (o.seed) {
        options["seed"] = *o.seed;
    }
    return {{"job_type", type}, {"device_id", o.device},         {"name", o.name},
            {"description", o.description}, {"shots", o.shots}, {"payload", std::move(payload)},
            {"options", std::move(options)}};
}

int finish_job(const ApiClient& api, const Globals& g, const ApiResponse& submitted, bool wait) {
    const auto id = submitted.json.at("job_id").get<std::string>();
    if (!wait) {
        if (g.json_out) {
            std::cout << submitted.body << "\n";
        } else {
            std::cout << id << "\n";
        }
        return kOk;
    }
    if (!g.json_out) {
        std::cout << "submitted job " << id << "\n" << std::flush;
    }
    const auto done = api.wait_job(id);
    if (g.json_out) {
        std::cout << done.body << "\n";
    } else {
        std::cout << describe_job(done.json);
    }
    if (done.json.value("status", std::string{}) != "succeeded") {
        std::cerr << fmt::format("job {} {}: {}\n", id, done.json.value("status", std::string{}),
                                 done.json.value("error_message", std::string{}));
        return kJobFailed;
    }
    return kOk;
}

void print_raw_or(const Globals& g, const ApiResponse& r, const std::string& human) {
    if (g.json_out) {
        std::cout << r.body << "\n";
    } else {
        std::cout << human;
    }
}

std::string self_dir() {
    std::error_code ec;
    const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
    return ec ? std::string{"."} : exe.parent_path().string();
}

struct ServeOptions {
    std::string db = "qstack.db";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string devices_dir;
    std::string program_dir;
    std::string admin_key;
    int program_timeout = 600;
    int ttl = 300;
    int http_threads = 16;
    std::vector<std::string> remotes;
};

int serve(const ServeOptions& o) {
    json cfg{{"db_path", o.db},
             {"host", o.host},
             {"port", o.port},
             {"devices_dir", o.devices_dir},
             {"program_dir", o.program_dir.empty() ? self_dir() : o.program_dir},
             {"admin_key", o.admin_key},
             {"program_timeout_s", o.program_timeout},
             {"default_ttl_s", o.ttl},
             {"http_threads", o.http_threads},
             {"remote_transpilers", json::array()}};
    for (const auto& spec : o.remotes) {
        // NAME=URL[,API_KEY[,REMOTE_NAME]]
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw CliExit(kUsage, fmt::format("--remote-transpiler expects NAME=URL[,KEY[,REMOTE]], got '{}'", spec));
        }
        std::vector<std::string> parts;
        std::stringstream rest(spec.substr(eq + 1));
        for (std::string part; std::getline(rest, part, ',');) {
            parts.push_back(part);
        }
        json r{{"name", spec.substr(0, eq)}, {"url", parts.at(0)}};
        if (parts.size() > 1) {
            r["api_key"] = parts[1];
        }
        if (parts.size() > 2) {
            r["remote_name"] = parts[2];
        }
        cfg["remote_transpilers"].push_back(r);
    }

    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    qs_server* raw = nullptr;
    if (qs_server_create(cfg.dump().c_str(), &raw) != QS_OK) {
        throw CliExit(kJobFailed, fmt::format("cannot start server: {}", qs_last_error()));
    }
    std::unique_ptr<qs_server, decltype(&qs_server_free)> server(raw, qs_server_free);
    int port = 0;
    if (qs_server_start(server.get(), &port) != QS_OK) {
        throw CliExit(kJobFailed, fmt::format("cannot start server: {}", qs_last_error()));
    }
    CString url;
    CString key;
    qs_server_base_url(server.get(), &url.p);
    qs_server_bootstrap_key(server.get(), &key.p);
    std::cout << "qstack serving on " << url.str() << "\n";
    if (!key.str().empty()) {
        std::cout << "admin api key: " << key.str() << "\n";
    }
    std::cout << std::flush;

    int sig = 0;
    sigwait(&stop_signals, &sig);
    std::cout << "shutting down\n" << std::flush;
    qs_server_stop(server.get());
    return kOk;
}

int run(int argc, char** argv) {
    CLI::App app{"qstack: submit and inspect quantum jobs"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--url", g.url, "Server base URL (env QSTACK_URL)");
    app.add_option("--api-key", g.api_key, "API key (env QSTACK_API_KEY)");
    app.add_option("--config", g.config, "Config file with {\"url\", \"api_key\"} (env QSTACK_CONFIG)");
    app.add_flag("--json", g.json_out, "Print the server's JSON instead of a summary");

    std::function<int()> action;
    auto api = [&g] { return ApiClient(resolve_config(g.url, g.api_key, g.config)); };

    // sample
    SubmitOptions sample_opts;
    std::string sample_qasm;
    auto* sample = app.add_subcommand("sample", "Submit a sampling job");
    sample->add_option("--qasm", sample_qasm, "OpenQASM 3 file")->required();
    add_submit_flags(sample, sample_opts, true);
    sample->callback([&] {
        action = [&] {
            const auto qasm = validated_qasm(sample_qasm);
            const auto client = api();
            const auto r = client.request("POST", "/jobs", job_body("sampling", sample_opts, {{"qasm", qasm}}));
            return finish_job(client, g, r, sample_opts.wait);
        };
    });

    // estimate
    SubmitOptions est_opts;
    std::string est_qasm;
    std::string est_operator;
    auto* estimate = app.add_subcommand("estimate", "Submit an estimation job");
    estimate->add_option("--qasm", est_qasm, "OpenQASM 3 file without measurements")->required();
    estimate->add_option("--operator", est_operator, "JSON file of [label, coefficient] pairs")->required();
    add_submit_flags(estimate, est_opts, true);
    estimate->callback([&] {
        action = [&] {
            const auto qasm = validated_qasm(est_qasm);
            const auto op = validated_operator(est_operator);
            const auto client = api();
            const auto r = client.request("POST", "/jobs",
                                          job_body("estimation", est_opts, {{"qasm", qasm}, {"operator", op}}));
            return finish_job(client, g, r, est_opts.wait);
        };
    });

    // multi
    SubmitOptions multi_opts;
    std::vector<std::string> multi_files;
    auto* multi = app.add_subcommand("multi", "Submit several circuits as one multi-programmed job");
    multi->add_option("--qasm", multi_files, "OpenQASM 3 files, in order")->required()->expected(1, -1);
    add_submit_flags(multi, multi_opts, true);
    multi->callback([&] {
        action = [&] {
            json circuits = json::array();
            for (const auto& f : multi_files) {
                circuits.push_back(validated_qasm(f));
            }
            const auto client = api();
            const auto r =
                client.request("POST", "/jobs", job_body("multi_manual", multi_opts, {{"circuits", circuits}}));
            return finish_job(client, g, r, multi_opts.wait);
        };
    });

    // jobs
    auto* jobs = app.add_subcommand("jobs", "List, show or cancel jobs");
    jobs->require_subcommand(1);
    std::string list_status;
    std::string list_device;
    std::string list_owner = "me";
    int list_limit = 0;
    auto* jobs_list = jobs->add_subcommand("list", "List visible jobs");
    jobs_list->add_option("--status", list_status, "Filter by status");
    jobs_list->add_option("--device", list_device, "Filter by device");
    jobs_list->add_option("--owner", list_owner, "Owner id, 'me' (default) or 'all' for admins");
    jobs_list->add_option("--limit", list_limit, "Maximum number of jobs");
    jobs_list->callback([&] {
        action = [&] {
            std::string query;
            auto add = [&query](const std::string& k, const std::string& v) {
                query += (query.empty() ? "?" : "&") + k + "=" + encode_query(v);
            };
            if (list_owner != "all") {
                add("owner", list_owner);
            }
            if (!list_status.empty()) {
                add("status", list_status);
            }
            if (!list_device.empty()) {
                add("device_id", list_device);
            }
            if (list_limit > 0) {
                add("limit", std::to_string(list_limit));
            }
            const auto r = api().request("GET", "/jobs" + query);
            print_raw_or(g, r, job_table(r.json));
            return int{kOk};
        };
    });
    std::string show_id;
    auto* jobs_show = jobs->add_subcommand("show", "Show one job");
    jobs_show->add_option("id", show_id, "Job id")->required();
    jobs_show->callback([&] {
        action = [&] {
            const auto r = api().request("GET", "/jobs/" + show_id);
            print_raw_or(g, r, describe_job(r.json));
            return int{kOk};
        };
    });
    std::string wait_id;
    auto* jobs_wait = jobs->add_subcommand("wait", "Wait for a job to finish");
    jobs_wait->add_option("id", wait_id, "Job id")->required();
    jobs_wait->callback([&] {
        action = [&] {
            const auto client = api();
            return finish_job(client, g, ApiResponse{200, "", {{"job_id", wait_id}}}, true);
        };
    });
    std::string cancel_id;
    auto* jobs_cancel = jobs->add_subcommand("cancel", "Cancel a submitted or queued job");
    jobs_cancel->add_option("id", cancel_id, "Job id")->required();
    jobs_cancel->callback([&] {
        action = [&] {
            const auto r = api().request("POST", "/jobs/" + cancel_id + "/cancel");
            print_raw_or(g, r, fmt::format("job {} cancelled\n", cancel_id));
            return int{kOk};
        };
    });

    // devices
    auto* devices = app.add_subcommand("devices", "List or show devices");
    devices->require_subcommand(1);
    devices->add_subcommand("list", "List devices")->callback([&] {
        action = [&] {
            const auto r = api().request("GET", "/devices");
            print_raw_or(g, r, device_table(r.json));
            return int{kOk};
        };
    });
    std::string device_id;
    auto* devices_show = devices->add_subcommand("show", "Show topology, basis and readout errors");
    devices_show->add_option("id", device_id, "Device id")->required();
    devices_show->callback([&] {
        action = [&] {
            const auto r = api().request("GET", "/devices/" + device_id);
            print_raw_or(g, r, describe_device(r.json));
            return int{kOk};
        };
    });
    std::string register_file;
    auto* devices_register = devices->add_subcommand("register", "Register a device from DeviceSpec JSON (admin)");
    devices_register->add_option("file", register_file, "DeviceSpec JSON file")->required();
    devices_register->callback([&] {
        action = [&] {
            const auto spec = json::parse(read_file(register_file), nullptr, false);
            if (spec.is_discarded()) {
                throw CliExit(kUsage, fmt::format("{} is not valid JSON", register_file));
            }
            const auto r = api().request("POST", "/devices", spec);
            print_raw_or(g, r, describe_device(r.json));
            return int{kOk};
        };
    });

    // session
    auto* session = app.add_subcommand("session", "Run a program with exclusive device access");
    session->require_subcommand(1);
    std::string manifest_file;
    std::string session_device;
    int session_ttl = 0;
    auto* session_run = session->add_subcommand("run", "Open a session, run the manifest program, close");
    session_run->add_option("--manifest", manifest_file, "JSON {command: [argv...], env: {...}, timeout_s}")
        ->required();
    session_run->add_option("--device", session_device, "Device to lease")->required();
    session_run->add_option("--ttl", session_ttl, "Inactivity timeout in seconds");
    session_run->callback([&] {
        action = [&] {
            const auto manifest = json::parse(read_file(manifest_file), nullptr, false);
            if (!manifest.is_object() || !manifest.contains("command")) {
                throw CliExit(kUsage, fmt::format("{} must be a JSON object with a 'command' array", manifest_file));
            }
            const auto client = api();
            json body{{"device_id", session_device}, {"manifest", manifest}};
            if (session_ttl > 0) {
                body["ttl_seconds"] = session_ttl;
            }
            const auto opened = client.request("POST", "/sessions", body);
            const auto sid = opened.json.at("session_id").get<std::string>();
            if (!g.json_out) {
                std::cout << "session " << sid << " queued\n" << std::flush;
            }
            std::set<std::string> seen;
            std::string last_state;
            auto delay = std::chrono::milliseconds(200);
            for (;;) {
                const auto job = client.request("GET", "/jobs/" + sid);
                const auto status = job.json.value("status", std::string{});
                const auto subs = client.request("GET", "/jobs?session_id=" + sid);
                for (const auto& s : subs.json) {
                    const auto id = s.value("id", std::string{});
                    if (seen.insert(id).second && !g.json_out) {
                        std::cout << fmt::format("  sub-job {} {} {}\n", id, s.value("job_type", std::string{}),
                                                 s.value("status", std::string{}))
                                  << std::flush;
                    }
                }
                if (!g.json_out && status != last_state) {
                    std::cout << "session " << status << "\n" << std::flush;
                    last_state = status;
                }
                if (status == "succeeded" || status == "failed" || status == "cancelled") {
                    if (g.json_out) {
                        std::cout << job.body << "\n";
                    } else {
                        std::cout << describe_job(job.json);
                    }
                    if (status != "succeeded") {
                        std::cerr << fmt::format("session {} {}: {}\n", sid, status,
                                                 job.json.value("error_message", std::string{}));
                        return int{kJobFailed};
                    }
                    return int{kOk};
                }
                std::this_thread::sleep_for(delay);
                delay = std::min(std::chrono::milliseconds(2000), delay * 3 / 2);
            }
        };
    });

    // users and keys (admin)
    auto* users = app.add_subcommand("users", "User administration");
    users->require_subcommand(1);
    std::string user_id;
    std::string user_name;
    std::string user_role = "user";
    auto* users_create = users->add_subcommand("create", "Create a user (admin)");
    users_create->add_option("--id", user_id, "User id");
    users_create->add_option("--name", user_name, "Display name");
    users_create->add_option("--role", user_role, "user or admin")->check(CLI::IsMember({"user", "admin"}));
    users_create->callback([&] {
        action = [&] {
            json body{{"name", user_name}, {"role", user_role}};
            if (!user_id.empty()) {
                body["id"] = user_id;
            }
            const auto r = api().request("POST", "/users", body);
            print_raw_or(g, r, r.json.value("id", std::string{}) + "\n");
            return int{kOk};
        };
    });
    users->add_subcommand("list", "List users (admin)")->callback([&] {
        action = [&] {
            const auto r = api().request("GET", "/users");
            std::string human;
            for (const auto& u : r.json) {
                human += fmt::format("{:<20} {:<8} {:<10} {}\n", u.value("id", std::string{}),
                                     u.value("role", std::string{}), u.value("status", std::string{}),
                                     u.value("name", std::string{}));
            }
            print_raw_or(g, r, human);
            return int{kOk};
        };
    });
    std::string status_user;
    for (const auto& [verb, help] : std::vector<std::pair<std::string, std::string>>{
             {"suspend", "Suspend a user (admin)"}, {"activate", "Reactivate a user (admin)"}}) {
        auto* cmd = users->add_subcommand(verb, help);
        cmd->add_option("id", status_user, "User id")->required();
        cmd->callback([&, verb = verb] {
            action = [&, verb] {
                const auto r = api().request("POST", "/users/" + status_user + "/" + verb);
                print_raw_or(g, r, fmt::format("{} {}\n", status_user, r.json.value("status", std::string{})));
                return int{kOk};
            };
        });
    }
    auto* keys = app.add_subcommand("keys", "API key management");
    keys->require_subcommand(1);
    std::string key_user;
    auto* keys_create = keys->add_subcommand("create", "Issue an API key; the secret is printed once");
    keys_create->add_option("--user", key_user, "Owner user id")->required();
    keys_create->callback([&] {
        action = [&] {
            const auto r = api().request("POST", "/users/" + key_user + "/apikeys");
            print_raw_or(g, r, r.json.value("key", std::string{}) + "\n");
            return int{kOk};
        };
    });
    std::string revoke_id;
    auto* keys_revoke = keys->add_subcommand("revoke", "Revoke an API key by key id");
    keys_revoke->add_option("id", revoke_id, "Key id")->required();
    keys_revoke->callback([&] {
        action = [&] {
            const auto r = api().request("POST", "/apikeys/" + revoke_id + "/revoke");
            print_raw_or(g, r, fmt::format("key {} revoked\n", revoke_id));
            return int{kOk};
        };
    });

    // offline tools through the C API
    std::string check_file;
    auto* qasm = app.add_subcommand("qasm", "Parse a QASM file and print its canonical form");
    qasm->add_option("file", check_file, "OpenQASM 3 file")->required();
    qasm->callback([&] {
        action = [&] {
            const auto c = parse_circuit_file(check_file);
            CString out;
            check(qs_circuit_emit(c.get(), &out.p), check_file);
            std::cout << out.str();
            return int{kOk};
        };
    });

    std::string tr_qasm;
    std::string tr_device;
    std::string tr_name = "default";
    int tr_simple = 0;
    auto* transpile = app.add_subcommand("transpile", "Transpile a circuit locally for a device");
    transpile->add_option("--qasm", tr_qasm, "OpenQASM 3 file")->required();
    auto* tr_dev_opt = transpile->add_option("--device-file", tr_device, "DeviceSpec JSON file");
    transpile->add_option("--line", tr_simple, "Use a noiseless line device of this many qubits")
        ->excludes(tr_dev_opt);
    transpile->add_option("--transpiler", tr_name, "default or identity");
    transpile->callback([&] {
        action = [&] {
            const auto c = parse_circuit_file(tr_qasm);
            const auto d = load_device(tr_device, tr_simple > 0 ? tr_simple : qs_circuit_num_qubits(c.get()));
            CString out;
            check(qs_transpile(c.get(), d.get(), tr_name.c_str(), nullptr, &out.p), "transpile");
            const auto r = json::parse(out.str());
            if (g.json_out) {
                std::cout << out.str() << "\n";
            } else {
                std::cout << r.at("qasm").get<std::string>();
                std::cout << fmt::format("// initial_layout {}\n// final_layout {}\n// metrics {}\n",
                                         r.at("initial_layout").dump(), r.at("final_layout").dump(),
                                         r.at("metrics").dump());
            }
            return int{kOk};
        };
    });

    std::string sim_qasm;
    std::string sim_device;
    std::uint64_t sim_shots = 1000;
    std::uint64_t sim_seed = 1;
    bool sim_noise = false;
    auto* simulate = app.add_subcommand("simulate", "Sample a circuit locally");
    simulate->add_option("--qasm", sim_qasm, "OpenQASM 3 file")->required();
    simulate->add_option("--shots", sim_shots, "Number of shots")->check(CLI::Range(std::uint64_t{1}, UINT64_MAX));
    simulate->add_option("--seed", sim_seed, "Sampling seed");
    simulate->add_option("--device-file", sim_device, "DeviceSpec JSON file for readout noise");
    simulate->add_flag("--noise", sim_noise, "Inject the device's readout errors");
    simulate->callback([&] {
        action = [&] {
            const auto c = parse_circuit_file(sim_qasm);
            const auto d = load_device(sim_device, qs_circuit_num_qubits(c.get()));
            CString out;
            check(qs_sample(c.get(), d.get(), sim_shots, sim_seed, sim_noise ? 1 : 0, &out.p), "simulate");
            if (g.json_out) {
                std::cout << out.str() << "\n";
            } else {
                std::cout << histogram(json::parse(out.str()));
            }
            return int{kOk};
        };
    });

    ServeOptions serve_opts;
    auto* serve_cmd = app.add_subcommand("serve", "Run the cloud API server with its device workers");
    serve_cmd->add_option("--db", serve_opts.db, "SQLite database file");
    serve_cmd->add_option("--host", serve_opts.host, "Listen address");
    serve_cmd->add_option("--port", serve_opts.port, "Listen port (0 picks a free port)");
    serve_cmd->add_option("--devices-dir", serve_opts.devices_dir, "Directory of DeviceSpec JSON files to register");
    serve_cmd->add_option("--program-dir", serve_opts.program_dir,
                          "Directory of session programs (default: this executable's directory)");
    serve_cmd->add_option("--admin-key", serve_opts.admin_key, "Admin key to install on an empty store")
        ->envname("QSTACK_ADMIN_KEY");
    serve_cmd->add_option("--program-timeout", serve_opts.program_timeout, "Session program timeout in seconds");
    serve_cmd->add_option("--ttl", serve_opts.ttl, "Default session inactivity timeout in seconds");
    serve_cmd->add_option("--http-threads", serve_opts.http_threads, "HTTP worker threads");
    serve_cmd->add_option("--remote-transpiler", serve_opts.remotes, "NAME=URL[,KEY[,REMOTE]] (repeatable)");
    serve_cmd->callback([&] { action = [&] { return serve(serve_opts); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    return action ? action() : kUsage;
}

} // namespace
} // namespace qstack::cli

int main(int argc, char** argv) {
    try {
        return qstack::cli::run(argc, argv);
    } catch (const qstack::cli::CliExit& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qstack::cli::kJobFailed;
    }
}
