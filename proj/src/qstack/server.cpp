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

#include "qstack/server.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

using nlohmann::json;

struct Reply {
    int status = 200;
    json body;
};

using Handler = std::function<Reply(const httplib::Request&, const Principal&)>;

enum class Access { Public, User, Admin };

struct Route {
    std::string method;
    std::string pattern;      // httplib regex
    std::string openapi_path; // templated form
    std::string summary;
    Access access = Access::User;
    bool session_token_ok = false;
    Handler handler;
};

json body_of(const httplib::Request& req) {
    if (req.body.empty()) {
        return json::object();
    }
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        raise(ErrorCode::InvalidArgument, fmt::format("request body is not valid JSON: {}", e.what()));
    }
}

std::string credential_of(const httplib::Request& req) {
    const auto auth = req.get_header_value("Authorization");
    constexpr std::string_view bearer = "Bearer ";
    if (auth.size() > bearer.size() && std::string_view(auth).substr(0, bearer.size()) == bearer) {
        return auth.substr(bearer.size());
    }
    return req.get_header_value("X-API-Key");
}

json error_body(ErrorCode code, const std::string& message) {
    return {{"error", to_string(code)}, {"message", message}};
}

void check_self_or_admin(const Principal& who, const std::string& user_id) {
    if (!who.is_admin() && who.user_id != user_id) {
        raise(ErrorCode::Forbidden, "only the user or an admin may do this");
    }
}

} // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Unauthorized:
        return 401;
    case ErrorCode::Forbidden:
        return 403;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownDevice:
        return 404;
    case ErrorCode::Conflict:
    case ErrorCode::DeviceBusy:
    case ErrorCode::DeviceUnavailable:
    case ErrorCode::NotCancellable:
    case ErrorCode::LeaseConflict:
    case ErrorCode::LeaseExpired:
    case ErrorCode::LeaseNotActive:
    case ErrorCode::DuplicateName:
        return 409;
    case ErrorCode::Storage:
    case ErrorCode::Internal:
        return 500;
    default:
        return 400;
    }
}

struct Server::Impl {
    httplib::Server http;
    std::vector<Route> routes;
};

Server::Server(ServerConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
    for (const auto& r : config_.remote_transpilers) {
        registry_.register_transpiler(r.name, remote_transpiler(r.url, r.api_key, r.remote_name));
    }
    store_ = std::make_unique<Store>(config_.db_path);
    EngineConfig ec;
    ec.program_dir = config_.program_dir;
    ec.program_timeout = config_.program_timeout;
    ec.default_ttl_seconds = config_.default_ttl_seconds;
    engine_ = std::make_unique<Engine>(*store_, registry_, ec);
    bootstrap();
    seed_devices();

    auto& routes = impl_->routes;
    auto add = [&](std::string method, std::string pattern, std::string path, std::string summary, Access access,
                   bool session_ok, Handler h) {
        routes.push_back({std::move(method), std::move(pattern), std::move(path), std::move(summary), access,
                          session_ok, std::move(h)});
    };
    const auto param = [](const httplib::Request& req, std::size_t i) { return req.matches[static_cast<int>(i)].str(); };

    add("GET", "/health", "/health", "Liveness probe", Access::Public, false,
        [](const auto&, const auto&) { return Reply{200, {{"status", "ok"}}}; });
    add("GET", "/openapi", "/openapi", "This API description", Access::Public, false,
        [this](const auto&, const auto&) { return Reply{200, openapi()}; });

    add("POST", "/jobs", "/jobs", "Submit a sampling, estimation, multi_manual or session job", Access::User, false,
        [this](const httplib::Request& req, const Principal& who) {
            const auto draft = JobDraft::from_json(body_of(req));
            const auto id = engine_->submit(who, draft);
            return Reply{201, {{"job_id", id}, {"status", "queued"}}};
        });
    add("GET", "/jobs", "/jobs", "List jobs visible to the caller", Access::User, false,
        [this](const httplib::Request& req, const Principal& who) {
            JobFilter f;
            if (req.has_param("owner")) {
                const auto owner = req.get_param_value("owner");
                f.owner = owner == "me" ? who.user_id : owner;
            }
            if (req.has_param("status")) {
                f.status = job_status_from_string(req.get_param_value("status"));
            }
            if (req.has_param("device_id")) {
                f.device_id = req.get_param_value("device_id");
            }
            if (req.has_param("session_id")) {
                f.session_id = req.get_param_value("session_id");
            }
            if (req.has_param("limit")) {
                f.limit = static_cast<std::size_t>(std::stoul(req.get_param_value("limit")));
            }
            json out = json::array();
            for (const auto& j : engine_->jobs_for(who, f)) {
                out.push_back(j.to_json());
            }
            return Reply{200, out};
        });
    add("GET", R"(/jobs/([^/]+))", "/jobs/{id}", "Fetch one job", Access::User, true,
        [this, param](const httplib::Request& req, const Principal& who) {
            const Job job = engine_->job_for(param(req, 1), who);
            if (!who.session_scope.empty() && job.session_id != who.session_scope && job.id != who.session_scope) {
                raise(ErrorCode::NotFound, fmt::format("job '{}' not found", job.id));
            }
            return Reply{200, job.to_json()};
        });
    add("POST", R"(/jobs/([^/]+)/cancel)", "/jobs/{id}/cancel", "Cancel a submitted or queued job", Access::User,
        false, [this, param](const httplib::Request& req, const Principal& who) {
            const auto id = param(req, 1);
            (void)engine_->job_for(id, who);
            engine_->cancel(id, who);
            return Reply{200, engine_->job_for(id, who).to_json()};
        });

    add("GET", "/devices", "/devices", "List devices with their calibration snapshot", Access::User, false,
        [this](const auto&, const auto&) {
            json out = json::array();
            for (const auto& d : store_->devices()) {
                out.push_back(d.to_json());
            }
            return Reply{200, out};
        });
    add("GET", R"(/devices/([^/]+))", "/devices/{id}", "Fetch one device", Access::User, false,
        [this, param](const httplib::Request& req, const Principal&) {
            return Reply{200, engine_->device(param(req, 1)).to_json()};
        });
    add("POST", "/devices", "/devices", "Register a device from DeviceSpec JSON", Access::Admin, false,
        [this](const httplib::Request& req, const Principal&) {
            return Reply{201, engine_->register_device(device_from_json(body_of(req))).to_json()};
        });
    add("PATCH", R"(/devices/([^/]+))", "/devices/{id}", "Update device fields (JSON merge patch)", Access::Admin,
        false, [this, param](const httplib::Request& req, const Principal&) {
            return Reply{200, engine_->update_device(param(req, 1), body_of(req)).to_json()};
        });
    add("DELETE", R"(/devices/([^/]+))", "/devices/{id}", "Delete an idle device", Access::Admin, false,
        [this, param](const httplib::Request& req, const Principal&) {
            engine_->delete_device(param(req, 1));
            return Reply{200, {{"deleted", param(req, 1)}}};
        });
    add("POST", R"(/devices/([^/]+)/calibrate)", "/devices/{id}/calibrate",
        "Measure readout confusion matrices and store the snapshot", Access::Admin, false,
        [this, param](const httplib::Request& req, const Principal&) {
            const auto body = body_of(req);
            const auto shots = body.value("shots", std::uint64_t{100000});
            const auto seed = body.value("seed", std::uint64_t{0});
            return Reply{200, engine_->calibrate_device(param(req, 1), shots, seed).to_json()};
        });
    add("GET", R"(/devices/([^/]+)/log)", "/devices/{id}/log", "Device execution log", Access::Admin, false,
        [this, param](const httplib::Request& req, const Principal&) {
            json out = json::array();
            for (const auto& r : store_->exec_log(param(req, 1))) {
                out.push_back(r.to_json());
            }
            return Reply{200, out};
        });

    add("POST", "/sessions", "/sessions", "Queue a session that leases a device", Access::User, false,
        [this](const httplib::Request& req, const Principal& who) {
            const auto body = body_of(req);
            const auto id = engine_->open_session(who, body.value("device_id", std::string{}),
                                                  body.value("ttl_seconds", std::int64_t{0}),
                                                  body.value("name", std::string{}), body.value("manifest", json{}));
            return Reply{201, {{"session_id", id}, {"job_id", id}}};
        });
    add("GET", R"(/sessions/([^/]+))", "/sessions/{id}", "Fetch a session lease", Access::User, true,
        [this, param](const httplib::Request& req, const Principal& who) {
            return Reply{200, engine_->session_for(param(req, 1), who).to_json()};
        });
    add("POST", R"(/sessions/([^/]+)/jobs)", "/sessions/{id}/jobs",
        "Run a sampling or estimation job immediately inside an active session", Access::User, true,
        [this, param](const httplib::Request& req, const Principal& who) {
            const Job job = engine_->session_submit(param(req, 1), who, JobDraft::from_json(body_of(req)));
            return Reply{201, job.to_json()};
        });
    add("POST", R"(/sessions/([^/]+)/close)", "/sessions/{id}/close", "Release a session lease", Access::User, true,
        [this, param](const httplib::Request& req, const Principal& who) {
            engine_->close_session(param(req, 1), who);
            return Reply{200, engine_->session_for(param(req, 1), who).to_json()};
        });

    add("POST", "/users", "/users", "Create a user", Access::Admin, false,
        [this](const httplib::Request& req, const Principal&) {
            const auto body = body_of(req);
            const auto role = user_role_from_string(body.value("role", std::string{"user"}));
            User u;
            const auto id = body.value("id", std::string{});
            if (!id.empty()) {
                store_->transaction([&] {
                    if (store_->user(id)) {
                        raise(ErrorCode::Conflict, fmt::format("user '{}' already exists", id));
                    }
                    u = User{id, body.value("name", id), role, UserStatus::Active, utc_now()};
                    store_->put_user(u);
                });
            } else {
                u = create_user(body.value("name", std::string{}), role);
            }
            return Reply{201, u.to_json()};
        });
    add("GET", "/users", "/users", "List users", Access::Admin, false, [this](const auto&, const auto&) {
        json out = json::array();
        for (const auto& u : store_->users()) {
            out.push_back(u.to_json());
        }
        return Reply{200, out};
    });
    const auto set_status = [this](const std::string& id, UserStatus status) {
        User u;
        store_->transaction([&] {
            auto found = store_->user(id);
            if (!found) {
                raise(ErrorCode::NotFound, fmt::format("user '{}' not found", id));
            }
            u = *found;
            u.status = status;
            store_->put_user(u);
        });
        return u;
    };
    add("POST", R"(/users/([^/]+)/suspend)", "/users/{id}/suspend", "Suspend a user", Access::Admin, false,
        [set_status, param](const httplib::Request& req, const Principal&) {
            return Reply{200, set_status(param(req, 1), UserStatus::Suspended).to_json()};
        });
    add("POST", R"(/users/([^/]+)/activate)", "/users/{id}/activate", "Reactivate a suspended user", Access::Admin,
        false, [set_status, param](const httplib::Request& req, const Principal&) {
            return Reply{200, set_status(param(req, 1), UserStatus::Active).to_json()};
        });
    add("DELETE", R"(/users/([^/]+))", "/users/{id}", "Mark a user deleted (records are retained)", Access::Admin,
        false, [set_status, param](const httplib::Request& req, const Principal&) {
            return Reply{200, set_status(param(req, 1), UserStatus::Deleted).to_json()};
        });
    add("POST", R"(/users/([^/]+)/apikeys)", "/users/{id}/apikeys", "Issue an API key (secret shown once)",
        Access::User, false, [this, param](const httplib::Request& req, const Principal& who) {
            const auto id = param(req, 1);
            check_self_or_admin(who, id);
            auto [key, secret] = issue_key(id);
            auto body = key.to_json();
            body["key"] = secret;
            return Reply{201, body};
        });
    add("GET", R"(/users/([^/]+)/apikeys)", "/users/{id}/apikeys", "List a user's API keys", Access::User, false,
        [this, param](const httplib::Request& req, const Principal& who) {
            const auto id = param(req, 1);
            check_self_or_admin(who, id);
            json out = json::array();
            for (const auto& k : store_->apikeys(id)) {
                out.push_back(k.to_json());
            }
            return Reply{200, out};
        });
    add("POST", R"(/apikeys/([^/]+)/revoke)", "/apikeys/{id}/revoke", "Revoke an API key", Access::User, false,
        [this, param](const httplib::Request& req, const Principal& who) {
            ApiKey key;
            store_->transaction([&] {
                auto found = store_->apikey(param(req, 1));
                if (!found || (!who.is_admin() && found->owner != who.user_id)) {
                    raise(ErrorCode::NotFound, fmt::format("api key '{}' not found", param(req, 1)));
                }
                key = *found;
                key.revoked = true;
                store_->put_apikey(key);
            });
            return Reply{200, key.to_json()};
        });

    add("POST", "/transpile", "/transpile", "Transpile OpenQASM for a device with a registered transpiler",
        Access::User, false, [this](const httplib::Request& req, const Principal&) {
            return Reply{200, handle_transpile_request(registry_, body_of(req))};
        });
    add("GET", "/transpilers", "/transpilers", "Registered transpiler names", Access::User, false,
        [this](const auto&, const auto&) { return Reply{200, registry_.names()}; });

    auto& http = impl_->http;
    const int threads = std::max(2, config_.http_threads);
    http.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    for (const auto& route : routes) {
        httplib::Server::Handler h = [this, route](const httplib::Request& req, httplib::Response& res) {
            Reply reply;
            try {
                Principal who;
                if (route.access != Access::Public) {
                    who = authorize(credential_of(req));
                    if (!who.session_scope.empty() && !route.session_token_ok) {
                        raise(ErrorCode::Forbidden, "session tokens only reach their own session");
                    }
                    if (route.access == Access::Admin && !who.is_admin()) {
                        raise(ErrorCode::Forbidden, "admin role required");
                    }
                }
                reply = route.handler(req, who);
            } catch (const JobValidationError& e) {
                reply = {400, error_body(e.code(), e.what())};
                reply.body["job_id"] = e.job_id();
            } catch (const Error& e) {
                reply = {http_status(e.code()), error_body(e.code(), e.what())};
            } catch (const json::exception& e) {
                reply = {400, error_body(ErrorCode::InvalidArgument, e.what())};
            } catch (const std::exception& e) {
                spdlog::error("{} {} failed: {}", req.method, req.path, e.what());
                reply = {500, error_body(ErrorCode::Internal, e.what())};
            }
            res.status = reply.status;
            res.set_content(reply.body.dump(), "application/json");
        };
        if (route.method == "GET") {
            http.Get(route.pattern, h);
        } else if (route.method == "POST") {
            http.Post(route.pattern, h);
        } else if (route.method == "PATCH") {
            http.Patch(route.pattern, h);
        } else if (route.method == "DELETE") {
            http.Delete(route.pattern, h);
        }
    }
}

Server::~Server() { stop(); }

void Server::bootstrap() {
    if (!store_->users().empty()) {
        return;
    }
    User admin{"admin", "administrator", UserRole::Admin, UserStatus::Active, utc_now()};
    store_->put_user(admin);
    const std::string secret = config_.bootstrap_admin_key.empty() ? "qsk_" + random_hex(24) : config_.bootstrap_admin_key;
    store_->put_apikey({random_hex(8), sha256_hex(secret), admin.id, utc_now(), false});
    bootstrap_key_ = secret;
}

void Server::seed_devices() {
    if (config_.devices_dir.empty() || !std::filesystem::is_directory(config_.devices_dir)) {
        return;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config_.devices_dir)) {
        if (entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f);
        const auto spec = device_from_json(json::parse(in));
        if (!store_->device(spec.id)) {
            engine_->register_device(spec);
            spdlog::info("registered device '{}' from {}", spec.id, f.string());
        }
    }
}

User Server::create_user(const std::string& name, UserRole role) {
    User u{"u-" + random_hex(6), name, role, UserStatus::Active, utc_now()};
    store_->put_user(u);
    return u;
}

std::pair<ApiKey, std::string> Server::issue_key(const std::string& user_id) {
    auto user = store_->user(user_id);
    if (!user || user->status == UserStatus::Deleted) {
        raise(ErrorCode::NotFound, fmt::format("user '{}' not found", user_id));
    }
    const std::string secret = "qsk_" + random_hex(24);
    ApiKey key{random_hex(8), sha256_hex(secret), user_id, utc_now(), false};
    store_->put_apikey(key);
    return {key, secret};
}

Principal Server::authorize(const std::string& credential) const {
    if (credential.empty()) {
        raise(ErrorCode::Unauthorized, "missing API key");
    }
    std::string owner;
    std::string scope;
    if (auto key = store_->apikey_by_hash(sha256_hex(credential))) {
        if (key->revoked) {
            raise(ErrorCode::Unauthorized, "API key revoked");
        }
        owner = key->owner;
    } else if (auto lease = engine_->session_by_token(credential)) {
        owner = lease->owner;
        scope = lease->id;
    } else {
        raise(ErrorCode::Unauthorized, "unknown API key");
    }
    const auto user = store_->user(owner);
    if (!user) {
        raise(ErrorCode::Unauthorized, "API key owner no longer exists");
    }
    if (user->status != UserStatus::Active) {
        raise(ErrorCode::Forbidden, fmt::format("user '{}' is {}", user->id, to_string(user->status)));
    }
    return Principal{user->id, scope.empty() ? user->role : UserRole::User, scope};
}

json Server::openapi() const {
    json paths = json::object();
    for (const auto& r : impl_->routes) {
        json op{{"summary", r.summary}};
        op["security"] = r.access == Access::Public ? json::array() : json::array({{{"bearerAuth", json::array()}}});
        if (r.access == Access::Admin) {
            op["x-admin-only"] = true;
        }
        json responses{{"200", {{"description", "success"}}}};
        if (r.access != Access::Public) {
            responses["401"] = {{"description", "missing, unknown or revoked credentials"}};
            responses["403"] = {{"description", "suspended user or insufficient role"}};
        }
        op["responses"] = responses;
        std::string method = r.method;
        std::transform(method.begin(), method.end(), method.begin(), [](unsigned char c) { return std::tolower(c); });
        paths[r.openapi_path][method] = op;
    }
    return {{"openapi", "3.0.3"},
            {"info", {{"title", "qstack cloud API"}, {"version", "0.1.0"}}},
            {"components", {{"securitySchemes", {{"bearerAuth", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
            {"paths", paths}};
}

int Server::bind() {
    if (bound_) {
        return port_;
    }
    auto& http = impl_->http;
    port_ = config_.port == 0 ? http.bind_to_any_port(config_.host) : (http.bind_to_port(config_.host, config_.port)
                                                                            ? config_.port
                                                                            : -1);
    if (port_ <= 0) {
        raise(ErrorCode::Internal, fmt::format("cannot listen on {}:{}", config_.host, config_.port));
    }
    bound_ = true;
    engine_->set_public_url(base_url());
    if (config_.start_workers) {
        engine_->start();
    }
    return port_;
}

std::string Server::base_url() const { return fmt::format("http://{}:{}", config_.host, port_); }

void Server::listen() {
    bind();
    impl_->http.listen_after_bind();
}

int Server::start_background() {
    const int port = bind();
    thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port;
}

void Server::stop() {
    impl_->http.stop();
    if (thread_.joinable()) {
        thread_.join();
    }
    if (engine_) {
        engine_->stop();
    }
}

} // namespace qstack
