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

#include "qstack/engine.hpp"

#include <cstdlib>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "qstack/estimation.hpp"
#include "qstack/mitigation.hpp"
#include "qstack/multiprog.hpp"
#include "qstack/program_runner.hpp"
#include "qstack/qasm.hpp"
#include "qstack/simulator.hpp"

namespace qstack {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string new_id() {
    const std::string h = random_hex(16);
    return fmt::format("{}-{}-{}-{}-{}", h.substr(0, 8), h.substr(8, 4), h.substr(12, 4), h.substr(16, 4),
                       h.substr(20));
}

std::uint64_t draw_seed() {
    std::random_device rd;
    const std::uint64_t hi = rd();
    const std::uint64_t lo = rd();
    return ((hi << 32) ^ lo) & ((std::uint64_t{1} << 53) - 1);
}

std::string describe(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        return fmt::format("{}: {}", to_string(err->code()), err->what());
    }
    return fmt::format("Internal: {}", e.what());
}

struct JobOptions {
    std::string transpiler = "default";
    TranspileOptions transpile;
    bool mitigation = false;
    std::optional<std::uint64_t> seed;
};

JobOptions parse_options(const json& o) {
    JobOptions out;
    if (!o.is_object()) {
        raise(ErrorCode::InvalidArgument, "options must be an object");
    }
    if (auto it = o.find("transpiler"); it != o.end() && !it->is_null()) {
        if (it->is_string()) {
            out.transpiler = it->get<std::string>();
        } else if (it->is_object()) {
            out.transpiler = it->value("name", std::string{"default"});
            if (auto opt = it->find("options"); opt != it->end() && !opt->is_null()) {
                out.transpile = TranspileOptions::from_json(*opt);
            }
        } else {
            raise(ErrorCode::InvalidArgument, "options.transpiler must be a name or {name, options}");
        }
    }
    if (auto it = o.find("mitigation"); it != o.end() && !it->is_null()) {
        if (!it->is_boolean()) {
            raise(ErrorCode::InvalidArgument, "options.mitigation must be a boolean");
        }
        out.mitigation = it->get<bool>();
    }
    if (auto it = o.find("seed"); it != o.end() && !it->is_null()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
            raise(ErrorCode::InvalidArgument, "options.seed must be a non-negative integer");
        }
        out.seed = it->get<std::uint64_t>();
    }
    return out;
}

std::string payload_string(const json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_string()) {
        raise(ErrorCode::InvalidArgument, fmt::format("payload.{} must be a string", key));
    }
    return it->get<std::string>();
}

Observable payload_operator(const json& payload) {
    auto it = payload.find("operator");
    if (it == payload.end()) {
        raise(ErrorCode::InvalidArgument, "payload.operator must be an array of [label, coefficient] pairs");
    }
    return operator_from_json(*it);
}

std::vector<QuantumCircuit> payload_circuits(const json& payload) {
    auto it = payload.find("circuits");
    if (it == payload.end() || !it->is_array() || it->empty()) {
        raise(ErrorCode::InvalidArgument, "payload.circuits must be a non-empty array of OpenQASM strings");
    }
    std::vector<QuantumCircuit> out;
    for (std::size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_string()) {
            raise(ErrorCode::InvalidArgument, fmt::format("payload.circuits[{}] must be a string", i));
        }
        try {
            out.push_back(parse_qasm((*it)[i].get<std::string>()));
        } catch (const Error& e) {
            raise(e.code(), fmt::format("circuit {}: {}", i, e.what()));
        }
    }
    return out;
}

json layout_json(const TranspileResult& tr) {
    return {{"transpiled_qasm", emit_qasm(tr.circuit)},
            {"initial_layout", tr.initial_layout},
            {"final_layout", tr.final_layout},
            {"metrics", metrics_to_json(tr.metrics)},
            {"transpiler_name", tr.transpiler_name}};
}

json quasi_json(const QuasiDistribution& q) {
    return {{"counts_mitigated", q.clipped_map()}, {"quasi_distribution", q.raw_map()}};
}

} // namespace

JobDraft JobDraft::from_json(const json& j) {
    if (!j.is_object()) {
        raise(ErrorCode::InvalidArgument, "job body must be a JSON object");
    }
    JobDraft d;
    try {
        d.job_type = job_type_from_string(j.value("job_type", std::string{"sampling"}));
        d.device_id = j.value("device_id", std::string{});
        d.name = j.value("name", std::string{});
        d.description = j.value("description", std::string{});
        if (auto it = j.find("shots"); it != j.end() && !it->is_null()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
                raise(ErrorCode::InvalidArgument, "shots must be a non-negative integer");
            }
            d.shots = it->get<std::uint64_t>();
        }
        d.payload = j.value("payload", json::object());
        d.options = j.value("options", json::object());
    } catch (const json::exception& e) {
        raise(ErrorCode::InvalidArgument, fmt::format("malformed job body: {}", e.what()));
    }
    if (!d.payload.is_object()) {
        raise(ErrorCode::InvalidArgument, "payload must be an object");
    }
    for (const char* key : {"qasm", "operator", "circuits", "manifest"}) {
        if (j.contains(key) && !d.payload.contains(key)) {
            d.payload[key] = j[key];
        }
    }
    return d;
}

Engine::Engine(Store& store, const TranspilerRegistry& registry, EngineConfig config)
    : store_(store), registry_(registry), config_(std::move(config)) {
    recover();
}

Engine::~Engine() { stop(); }

void Engine::recover() {
    const std::string now = utc_now();
    store_.transaction([&] {
        for (auto job : store_.jobs({.status = JobStatus::Running})) {
            job.status = JobStatus::Failed;
            job.error_message = "host restarted while the job was running";
            job.result = nullptr;
            job.ended_at = now;
            store_.put_job(job);
        }
        for (auto job : store_.jobs({.status = JobStatus::Submitted})) {
            job.status = JobStatus::Failed;
            job.error_message = "host restarted before the job was queued";
            job.ended_at = now;
            store_.put_job(job);
        }
        for (auto lease : store_.sessions()) {
            const auto job = store_.job(lease.id);
            const bool still_queued = job && job->status == JobStatus::Queued;
            if (lease.state == LeaseState::Active || (lease.state == LeaseState::Pending && !still_queued)) {
                lease.state = LeaseState::Expired;
                lease.released_at = now;
                lease.token_hash.clear();
                store_.put_session(lease);
            }
        }
    });
}

void Engine::set_public_url(std::string url) { config_.public_url = std::move(url); }

Engine::DeviceSlot& Engine::slot(const std::string& device_id) {
    std::lock_guard lock(slots_mutex_);
    auto& s = slots_[device_id];
    if (!s) {
        s = std::make_unique<DeviceSlot>();
    }
    return *s;
}

void Engine::notify(const std::string& device_id) {
    auto& s = slot(device_id);
    {
        std::lock_guard lock(s.wake_mutex);
        s.wake = true;
    }
    s.wake_cv.notify_all();
}

void Engine::start() {
    std::vector<std::string> ids;
    for (const auto& d : store_.devices()) {
        ids.push_back(d.spec.id);
    }
    {
        std::lock_guard lock(slots_mutex_);
        if (started_) {
            return;
        }
        started_ = true;
    }
    for (const auto& id : ids) {
        spawn_worker(id);
    }
}

void Engine::spawn_worker(const std::string& device_id) {
    auto& s = slot(device_id);
    std::lock_guard lock(s.wake_mutex);
    if (s.thread.joinable()) {
        return;
    }
    s.stop = false;
    s.thread = std::thread([this, device_id] { worker_loop(device_id); });
}

void Engine::stop() {
    std::vector<DeviceSlot*> all;
    {
        std::lock_guard lock(slots_mutex_);
        started_ = false;
        for (auto& [_, s] : slots_) {
            all.push_back(s.get());
        }
    }
    for (auto* s : all) {
        {
            std::lock_guard lock(s->wake_mutex);
            s->stop = true;
        }
        s->wake_cv.notify_all();
    }
    for (auto* s : all) {
        if (s->thread.joinable()) {
            s->thread.join();
        }
    }
}

void Engine::worker_loop(const std::string& device_id) {
    auto& s = slot(device_id);
    for (;;) {
        {
            std::lock_guard lock(s.wake_mutex);
            if (s.stop) {
                return;
            }
        }
        std::optional<std::string> processed;
        try {
            processed = worker_step(device_id);
        } catch (const std::exception& e) {
            spdlog::error("worker for '{}' failed: {}", device_id, e.what());
        }
        if (!processed) {
            std::unique_lock lock(s.wake_mutex);
            s.wake_cv.wait_for(lock, std::chrono::seconds(1), [&] { return s.stop || s.wake; });
            s.wake = false;
        }
    }
}

DeviceRecord Engine::device(const std::string& id) const {
    auto rec = store_.device(id);
    if (!rec) {
        raise(ErrorCode::NotFound, fmt::format("device '{}' not found", id));
    }
    return *rec;
}

DeviceRecord Engine::register_device(const DeviceSpec& spec) {
    spec.validate();
    DeviceRecord rec{spec, std::nullopt};
    store_.transaction([&] {
        if (store_.device(spec.id)) {
            raise(ErrorCode::Conflict, fmt::format("device '{}' already exists", spec.id));
        }
        store_.put_device(rec);
    });
    bool started = false;
    {
        std::lock_guard lock(slots_mutex_);
        started = started_;
    }
    if (started) {
        spawn_worker(spec.id);
    }
    return rec;
}

DeviceRecord Engine::update_device(const std::string& id, const json& patch) {
    if (!patch.is_object()) {
        raise(ErrorCode::InvalidDevice, "device patch must be an object");
    }
    DeviceRecord out;
    store_.transaction([&] {
        DeviceRecord rec = device(id);
        if (patch.contains("id") && patch.at("id") != id) {
            raise(ErrorCode::InvalidDevice, "device id cannot change");
        }
        json j = rec.to_json();
        j.merge_patch(patch);
        out = DeviceRecord::from_json(j);
        if (out.calibration && static_cast<int>(out.calibration->matrices.size()) != out.spec.n_qubits) {
            out.calibration.reset();
        }
        store_.put_device(out);
    });
    notify(id);
    return out;
}

void Engine::delete_device(const std::string& id) {
    store_.transaction([&] {
        (void)device(id);
        const auto queued = store_.jobs({.status = JobStatus::Queued, .device_id = id});
        const auto running = store_.jobs({.status = JobStatus::Running, .device_id = id});
        if (!queued.empty() || !running.empty()) {
            raise(ErrorCode::DeviceBusy, fmt::format("device '{}' has {} queued and {} running jobs", id,
                                                     queued.size(), running.size()));
        }
        store_.delete_device(id);
    });
    std::unique_ptr<DeviceSlot> removed;
    {
        std::lock_guard lock(slots_mutex_);
        auto it = slots_.find(id);
        if (it != slots_.end()) {
            removed = std::move(it->second);
            slots_.erase(it);
        }
    }
    if (removed) {
        {
            std::lock_guard lock(removed->wake_mutex);
            removed->stop = true;
        }
        removed->wake_cv.notify_all();
        if (removed->thread.joinable()) {
            removed->thread.join();
        }
    }
}

DeviceRecord Engine::calibrate_device(const std::string& id, std::uint64_t shots, std::uint64_t seed) {
    DeviceRecord rec = device(id);
    Calibration cal;
    cal.matrices = calibrate_readout(rec.spec, shots, seed);
    cal.shots = shots;
    cal.calibrated_at = utc_now();
    store_.transaction([&] {
        rec = device(id);
        rec.calibration = cal;
        rec.spec.calibrated_at = cal.calibrated_at;
        store_.put_device(rec);
    });
    return rec;
}

std::vector<ConfusionMatrix> Engine::calibration_for(DeviceRecord& device, std::uint64_t seed) {
    if (device.calibration && static_cast<int>(device.calibration->matrices.size()) == device.spec.n_qubits) {
        return device.calibration->matrices;
    }
    device = calibrate_device(device.spec.id, config_.calibration_shots, seed ^ 0x5eedca11b7a7e5ULL);
    return device.calibration->matrices;
}

void Engine::validate_draft(const JobDraft& draft, const DeviceRecord& device) const {
    const auto check_width = [&](const QuantumCircuit& c) {
        if (c.n_qubits() > device.spec.n_qubits) {
            raise(ErrorCode::CircuitTooLarge, fmt::format("circuit uses {} qubits, device '{}' has {}", c.n_qubits(),
                                                          device.spec.id, device.spec.n_qubits));
        }
    };
    const JobOptions opts = parse_options(draft.options);
    if (!registry_.contains(opts.transpiler)) {
        raise(ErrorCode::UnknownTranspiler, fmt::format("unknown transpiler '{}'", opts.transpiler));
    }
    if (draft.job_type != JobType::Session && draft.shots == 0) {
        raise(ErrorCode::ZeroShots, "shots must be positive");
    }
    switch (draft.job_type) {
    case JobType::Sampling: {
        const auto c = parse_qasm(payload_string(draft.payload, "qasm"));
        if (!c.has_measurements()) {
            raise(ErrorCode::NoMeasurements, "sampling circuits need at least one measurement");
        }
        check_width(c);
        break;
    }
    case JobType::Estimation: {
        const auto c = parse_qasm(payload_string(draft.payload, "qasm"));
        if (c.has_measurements()) {
            raise(ErrorCode::BaseCircuitHasMeasurements, "estimation circuits must not contain measurements");
        }
        check_width(c);
        const auto obs = payload_operator(draft.payload);
        if (obs.max_qubit() >= device.spec.n_qubits) {
            raise(ErrorCode::CircuitTooLarge,
                  fmt::format("operator acts on qubit {} beyond device '{}'", obs.max_qubit(), device.spec.id));
        }
        break;
    }
    case JobType::MultiManual: {
        int total = 0;
        for (const auto& c : payload_circuits(draft.payload)) {
            total += c.n_qubits();
        }
        if (total > device.spec.n_qubits) {
            raise(ErrorCode::InsufficientQubits,
                  fmt::format("circuits need {} qubits, device '{}' has {}", total, device.spec.id,
                              device.spec.n_qubits));
        }
        break;
    }
    case JobType::Session: {
        const json manifest = draft.payload.value("manifest", json{});
        if (manifest.is_null()) {
            break;
        }
        if (!manifest.is_object()) {
            raise(ErrorCode::InvalidArgument, "session manifest must be an object");
        }
        if (auto it = manifest.find("command"); it != manifest.end()) {
            if (!it->is_array() || it->empty()) {
                raise(ErrorCode::InvalidArgument, "manifest.command must be a non-empty argv array");
            }
            for (const auto& a : *it) {
                if (!a.is_string()) {
                    raise(ErrorCode::InvalidArgument, "manifest.command entries must be strings");
                }
            }
        }
        if (auto it = manifest.find("env"); it != manifest.end()) {
            if (!it->is_object()) {
                raise(ErrorCode::InvalidArgument, "manifest.env must be an object of strings");
            }
            for (const auto& [k, v] : it->items()) {
                if (!v.is_string()) {
                    raise(ErrorCode::InvalidArgument, fmt::format("manifest.env.{} must be a string", k));
                }
            }
        }
        if (auto it = manifest.find("timeout_s"); it != manifest.end() && !(it->is_number() && it->get<double>() > 0)) {
            raise(ErrorCode::InvalidArgument, "manifest.timeout_s must be a positive number");
        }
        break;
    }
    }
}

std::string Engine::submit(const Principal& who, const JobDraft& draft) {
    auto rec = store_.device(draft.device_id);
    if (!rec) {
        raise(ErrorCode::UnknownDevice, fmt::format("unknown device '{}'", draft.device_id));
    }
    if (rec->spec.status != DeviceStatus::Available) {
        raise(ErrorCode::DeviceUnavailable, fmt::format("device '{}' is not available", draft.device_id));
    }

    Job job;
    job.id = new_id();
    job.owner = who.user_id;
    job.device_id = draft.device_id;
    job.job_type = draft.job_type;
    job.name = draft.name;
    job.description = draft.description;
    job.shots = draft.shots;
    job.payload = draft.payload;
    job.options = draft.options;
    job.submitted_at = utc_now();

    std::string problem;
    try {
        validate_draft(draft, *rec);
    } catch (const Error& e) {
        problem = describe(e);
    } catch (const json::exception& e) {
        problem = fmt::format("InvalidArgument: {}", e.what());
    }

    store_.transaction([&] {
        job.queue_seq = store_.next_queue_seq();
        if (!problem.empty()) {
            job.status = JobStatus::Failed;
            job.error_message = problem;
            job.ended_at = job.submitted_at;
        } else {
            job.status = JobStatus::Queued;
        }
        store_.put_job(job);
        if (job.job_type == JobType::Session && problem.empty()) {
            SessionLease lease;
            lease.id = job.id;
            lease.owner = job.owner;
            lease.device_id = job.device_id;
            lease.ttl_seconds = job.payload.value("ttl_seconds", config_.default_ttl_seconds);
            lease.created_at = job.submitted_at;
            store_.put_session(lease);
        }
    });
    if (!problem.empty()) {
        throw JobValidationError(job.id, problem);
    }
    notify(job.device_id);
    return job.id;
}

std::optional<std::string> Engine::worker_step(const std::string& device_id) {
    auto& s = slot(device_id);
    std::lock_guard step(s.step_mutex);
    for (;;) {
        auto head = store_.queue_head(device_id);
        if (!head) {
            return std::nullopt;
        }
        Job job = *head;
        bool claimed = false;
        store_.transaction([&] {
            auto current = store_.job(job.id);
            if (!current || current->status != JobStatus::Queued) {
                return;
            }
            job = *current;
            job.status = JobStatus::Running;
            job.started_at = utc_now();
            store_.put_job(job);
            claimed = true;
        });
        if (!claimed) {
            continue;
        }
        if (job.job_type == JobType::Session) {
            run_session(job);
            return job.id;
        }
        std::lock_guard exec(s.exec_mutex);
        const std::int64_t seq = store_.append_exec({0, job.id, device_id, "", job.started_at, ""});
        try {
            auto device = store_.device(device_id);
            if (!device) {
                raise(ErrorCode::UnknownDevice, fmt::format("device '{}' was removed", device_id));
            }
            finish(job, seq, execute(job, *device), "");
        } catch (const std::exception& e) {
            finish(job, seq, nullptr, describe(e));
        }
        return job.id;
    }
}

void Engine::finish(Job job, std::int64_t exec_seq, const json& result, const std::string& error) {
    const std::string now = utc_now();
    store_.transaction([&] {
        if (exec_seq > 0) {
            store_.finish_exec(exec_seq, now);
        }
        job.ended_at = now;
        if (error.empty()) {
            job.status = JobStatus::Succeeded;
            job.result = result;
            job.error_message.clear();
        } else {
            job.status = JobStatus::Failed;
            job.result = nullptr;
            job.error_message = error;
        }
        store_.put_job(job);
    });
}

json Engine::execute(const Job& job, DeviceRecord device) {
    const JobOptions opts = parse_options(job.options);
    const std::uint64_t seed = opts.seed.value_or(draw_seed());
    const DeviceSpec& spec = device.spec;
    SampleOptions sopts;
    sopts.max_qubits = config_.max_qubits;

    json result{{"seed", seed}, {"shots", job.shots}};
    switch (job.job_type) {
    case JobType::Sampling: {
        const auto circuit = parse_qasm(payload_string(job.payload, "qasm"));
        const auto tr = registry_.transpile(circuit, spec, opts.transpiler, opts.transpile);
        const Counts counts = sample(tr.circuit, job.shots, seed, spec, sopts);
        result.update(layout_json(tr));
        result["counts"] = counts.to_json();
        if (opts.mitigation) {
            const auto cal = calibration_for(device, seed);
            result.update(quasi_json(Mitigator(matrices_for_clbits(tr.circuit, cal)).apply(counts)));
            result["calibrated_at"] = device.calibration->calibrated_at;
        }
        break;
    }
    case JobType::Estimation: {
        const auto circuit = parse_qasm(payload_string(job.payload, "qasm"));
        EstimateOptions eopts;
        eopts.transpiler = opts.transpiler;
        eopts.transpile = opts.transpile;
        eopts.mitigation = opts.mitigation;
        if (opts.mitigation) {
            eopts.calibration = calibration_for(device, seed);
        }
        const auto r = estimate(circuit, payload_operator(job.payload), job.shots, spec, seed, registry_, eopts);
        result.update(r.to_json());
        break;
    }
    case JobType::MultiManual: {
        const auto circuits = payload_circuits(job.payload);
        const auto [combined, plan] = combine(circuits, spec);
        TranspileOptions topts = opts.transpile;
        topts.regions = plan.regions();
        std::vector<int> identity(static_cast<std::size_t>(spec.n_qubits));
        for (int q = 0; q < spec.n_qubits; ++q) {
            identity[static_cast<std::size_t>(q)] = q;
        }
        topts.initial_layout = identity;
        const auto tr = registry_.transpile(combined, spec, opts.transpiler, topts);
        const Counts counts = sample(tr.circuit, job.shots, seed, spec, sopts);
        const auto parts = split_counts(counts, plan);
        json results = json::array();
        for (const auto& p : parts) {
            results.push_back(p.to_json());
        }
        result.update(layout_json(tr));
        result["plan"] = plan.to_json();
        result["combined_counts"] = counts.to_json();
        result["results"] = results;
        if (opts.mitigation) {
            const auto mats = matrices_for_clbits(tr.circuit, calibration_for(device, seed));
            json mitigated = json::array();
            for (std::size_t k = 0; k < parts.size(); ++k) {
                std::vector<ConfusionMatrix> sub;
                for (int c : plan.circuits[k].clbit_map) {
                    sub.push_back(mats[static_cast<std::size_t>(c)]);
                }
                mitigated.push_back(sub.empty() ? json::object() : quasi_json(Mitigator(sub).apply(parts[k])));
            }
            result["results_mitigated"] = mitigated;
        }
        break;
    }
    case JobType::Session:
        raise(ErrorCode::ForbiddenSubJobType, "session jobs cannot run as a pipeline");
    }
    return result;
}

bool Engine::lease_expired(const SessionLease& lease) const {
    std::lock_guard lock(lease_mutex_);
    auto it = lease_activity_.find(lease.id);
    if (it == lease_activity_.end()) {
        return true;
    }
    return Clock::now() >= it->second + std::chrono::seconds(lease.ttl_seconds);
}

void Engine::run_session(Job job) {
    auto& s = slot(job.device_id);
    const std::string now = utc_now();
    SessionLease lease;
    {
        std::lock_guard lock(lease_mutex_);
        lease_activity_[job.id] = Clock::now();
    }
    try {
        store_.transaction([&] {
            auto stored = store_.session(job.id);
            if (stored) {
                lease = *stored;
            } else {
                lease.id = job.id;
                lease.owner = job.owner;
                lease.device_id = job.device_id;
                lease.ttl_seconds = job.payload.value("ttl_seconds", config_.default_ttl_seconds);
                lease.created_at = job.submitted_at;
            }
            for (const auto& other : store_.sessions()) {
                if (other.device_id == job.device_id && other.id != job.id && other.state == LeaseState::Active) {
                    raise(ErrorCode::LeaseConflict,
                          fmt::format("device '{}' already has an active lease", job.device_id));
                }
            }
            lease.state = LeaseState::Active;
            lease.activated_at = now;
            lease.last_activity = now;
            store_.put_session(lease);
        });
    } catch (...) {
        std::lock_guard lock(lease_mutex_);
        lease_activity_.erase(job.id);
        throw;
    }

    const json manifest = job.payload.value("manifest", json{});
    json result = json::object();
    std::string error;
    std::string closed_by = "close";

    if (manifest.is_object() && manifest.contains("command")) {
        const std::string token = random_hex(24);
        store_.transaction([&] {
            lease = *store_.session(lease.id);
            lease.token_hash = sha256_hex(token);
            store_.put_session(lease);
        });
        std::map<std::string, std::string> env;
        if (auto it = manifest.find("env"); it != manifest.end()) {
            for (const auto& [k, v] : it->items()) {
                env[k] = v.get<std::string>();
            }
        }
        const char* path = std::getenv("PATH");
        env.try_emplace("PATH", path ? path : "/usr/local/bin:/usr/bin:/bin");
        env["SESSION_ID"] = lease.id;
        env["SESSION_URL"] = config_.public_url + "/sessions/" + lease.id;
        env["SESSION_TOKEN"] = token;
        env["QSTACK_URL"] = config_.public_url;
        const auto timeout = manifest.contains("timeout_s")
                                 ? std::chrono::milliseconds(
                                       static_cast<std::int64_t>(manifest.at("timeout_s").get<double>() * 1000.0))
                                 : std::chrono::duration_cast<std::chrono::milliseconds>(config_.program_timeout);
        const std::string lease_id = lease.id;
        const auto abort = [&] {
            {
                std::lock_guard lock(s.wake_mutex);
                if (s.stop) {
                    return true;
                }
            }
            std::lock_guard lock(lease_mutex_);
            return lease_activity_.count(lease_id) == 0;
        };
        closed_by = "program_exit";
        try {
            const auto report =
                run_program(config_.program_dir, manifest.at("command").get<std::vector<std::string>>(), env, timeout,
                            abort);
            result["exit_code"] = report.exit_code;
            result["stdout"] = report.stdout_text;
            result["stderr"] = report.stderr_text;
            result["elapsed_seconds"] = report.elapsed_seconds;
            if (report.exit_code != 0) {
                const auto& err = report.stderr_text;
                error = fmt::format("program exited with status {}: {}", report.exit_code,
                                    err.size() > 500 ? err.substr(err.size() - 500) : err);
            }
        } catch (const std::exception& e) {
            error = describe(e);
        }
    } else {
        std::unique_lock lock(s.wake_mutex);
        for (;;) {
            if (s.stop) {
                error = "Internal: host shut down during the session";
                break;
            }
            lock.unlock();
            const auto current = store_.session(lease.id);
            lock.lock();
            if (!current || current->state != LeaseState::Active) {
                break;
            }
            Clock::time_point deadline;
            {
                std::lock_guard lease_lock(lease_mutex_);
                auto it = lease_activity_.find(lease.id);
                if (it == lease_activity_.end()) {
                    break;
                }
                deadline = it->second + std::chrono::seconds(current->ttl_seconds);
            }
            if (Clock::now() >= deadline) {
                closed_by = "ttl";
                break;
            }
            s.wake_cv.wait_until(lock, deadline, [&] { return s.stop || s.wake; });
            s.wake = false;
        }
    }

    {
        std::lock_guard lock(lease_mutex_);
        lease_activity_.erase(lease.id);
    }
    {
        // Serializes with in-flight sub-jobs so the release time follows the last of them.
        std::lock_guard exec(s.exec_mutex);
        store_.transaction([&] {
            lease = *store_.session(lease.id);
            if (lease.state == LeaseState::Active) {
                lease.state = closed_by == "ttl" ? LeaseState::Expired : LeaseState::Closed;
            }
            lease.released_at = utc_now();
            lease.token_hash.clear();
            store_.put_session(lease);
        });
    }
    result["sub_jobs"] = lease.sub_jobs;
    result["closed_by"] = closed_by;
    result["lease"] = lease.to_json();
    finish(job, 0, result, error);
}

std::string Engine::open_session(const Principal& who, const std::string& device_id, std::int64_t ttl_seconds,
                                 const std::string& name, const json& manifest) {
    JobDraft draft;
    draft.job_type = JobType::Session;
    draft.device_id = device_id;
    draft.name = name;
    draft.payload = {{"ttl_seconds", ttl_seconds > 0 ? ttl_seconds : config_.default_ttl_seconds}};
    if (!manifest.is_null()) {
        draft.payload["manifest"] = manifest;
    }
    return submit(who, draft);
}

SessionLease Engine::session_for(const std::string& lease_id, const Principal& who) const {
    auto lease = store_.session(lease_id);
    if (!lease || (!who.is_admin() && lease->owner != who.user_id) ||
        (!who.session_scope.empty() && who.session_scope != lease_id)) {
        raise(ErrorCode::NotFound, fmt::format("session '{}' not found", lease_id));
    }
    return *lease;
}

std::optional<SessionLease> Engine::session_by_token(const std::string& token) const {
    auto lease = store_.session_by_token_hash(sha256_hex(token));
    if (!lease || lease->state != LeaseState::Active) {
        return std::nullopt;
    }
    return lease;
}

Job Engine::session_submit(const std::string& lease_id, const Principal& who, JobDraft draft) {
    SessionLease lease = session_for(lease_id, who);
    if (draft.job_type != JobType::Sampling && draft.job_type != JobType::Estimation) {
        raise(ErrorCode::ForbiddenSubJobType,
              fmt::format("'{}' jobs cannot run inside a session", to_string(draft.job_type)));
    }
    const auto check_state = [&](const SessionLease& l) {
        if (l.state == LeaseState::Pending) {
            raise(ErrorCode::LeaseNotActive, fmt::format("session '{}' is waiting for the device", lease_id));
        }
        if (l.state != LeaseState::Active) {
            raise(ErrorCode::LeaseExpired, fmt::format("session '{}' is {}", lease_id, to_string(l.state)));
        }
        const auto session_job = store_.job(lease_id);
        const bool interactive = !session_job || !session_job->payload.value("manifest", json{}).contains("command");
        if (interactive && lease_expired(l)) {
            notify(l.device_id);
            raise(ErrorCode::LeaseExpired, fmt::format("session '{}' expired after {} s of inactivity", lease_id,
                                                       l.ttl_seconds));
        }
    };
    check_state(lease);
    if (!draft.device_id.empty() && draft.device_id != lease.device_id) {
        raise(ErrorCode::InvalidArgument,
              fmt::format("session '{}' holds device '{}', not '{}'", lease_id, lease.device_id, draft.device_id));
    }
    draft.device_id = lease.device_id;
    DeviceRecord device = this->device(lease.device_id);

    Job job;
    job.id = new_id();
    job.owner = lease.owner;
    job.device_id = lease.device_id;
    job.job_type = draft.job_type;
    job.name = draft.name;
    job.description = draft.description;
    job.shots = draft.shots;
    job.payload = draft.payload;
    job.options = draft.options;
    job.session_id = lease_id;
    job.submitted_at = utc_now();

    std::string problem;
    try {
        validate_draft(draft, device);
    } catch (const Error& e) {
        problem = describe(e);
    } catch (const json::exception& e) {
        problem = fmt::format("InvalidArgument: {}", e.what());
    }

    auto& s = slot(lease.device_id);
    std::lock_guard exec(s.exec_mutex);
    check_state(*store_.session(lease_id));
    {
        std::lock_guard lock(lease_mutex_);
        lease_activity_[lease_id] = Clock::now();
    }
    std::int64_t seq = 0;
    store_.transaction([&] {
        job.queue_seq = store_.next_queue_seq();
        lease = *store_.session(lease_id);
        lease.sub_jobs.push_back(job.id);
        lease.last_activity = job.submitted_at;
        store_.put_session(lease);
        if (!problem.empty()) {
            job.status = JobStatus::Failed;
            job.error_message = problem;
            job.ended_at = job.submitted_at;
        } else {
            job.status = JobStatus::Running;
            job.started_at = utc_now();
            seq = store_.append_exec({0, job.id, job.device_id, lease_id, job.started_at, ""});
        }
        store_.put_job(job);
    });
    if (!problem.empty()) {
        throw JobValidationError(job.id, problem);
    }
    try {
        finish(job, seq, execute(job, device), "");
    } catch (const std::exception& e) {
        finish(job, seq, nullptr, describe(e));
    }
    {
        std::lock_guard lock(lease_mutex_);
        if (lease_activity_.count(lease_id)) {
            lease_activity_[lease_id] = Clock::now();
        }
    }
    return *store_.job(job.id);
}

void Engine::close_session(const std::string& lease_id, const Principal& who) {
    SessionLease lease = session_for(lease_id, who);
    bool cancelled_job = false;
    store_.transaction([&] {
        lease = *store_.session(lease_id);
        if (lease.state == LeaseState::Pending) {
            auto job = store_.job(lease_id);
            if (job && job->status == JobStatus::Queued) {
                job->status = JobStatus::Cancelled;
                job->ended_at = utc_now();
                store_.put_job(*job);
                cancelled_job = true;
            }
            lease.state = LeaseState::Closed;
            lease.released_at = utc_now();
            store_.put_session(lease);
        } else if (lease.state == LeaseState::Active) {
            lease.state = LeaseState::Closed;
            store_.put_session(lease);
        }
    });
    if (!cancelled_job) {
        std::lock_guard lock(lease_mutex_);
        lease_activity_.erase(lease_id);
    }
    notify(lease.device_id);
}

void Engine::cancel(const std::string& job_id, const Principal& who) {
    store_.transaction([&] {
        auto job = store_.job(job_id);
        if (!job) {
            raise(ErrorCode::NotFound, fmt::format("job '{}' not found", job_id));
        }
        if (!who.is_admin() && job->owner != who.user_id) {
            raise(ErrorCode::Forbidden, fmt::format("job '{}' belongs to another user", job_id));
        }
        if (job->status != JobStatus::Submitted && job->status != JobStatus::Queued) {
            raise(ErrorCode::NotCancellable, fmt::format("job '{}' is {}", job_id, to_string(job->status)));
        }
        job->status = JobStatus::Cancelled;
        job->ended_at = utc_now();
        store_.put_job(*job);
        if (job->job_type == JobType::Session) {
            if (auto lease = store_.session(job_id)) {
                lease->state = LeaseState::Closed;
                lease->released_at = job->ended_at;
                store_.put_session(*lease);
            }
        }
    });
}

Job Engine::job_for(const std::string& job_id, const Principal& who) const {
    auto job = store_.job(job_id);
    if (!job || (!who.is_admin() && job->owner != who.user_id)) {
        raise(ErrorCode::NotFound, fmt::format("job '{}' not found", job_id));
    }
    return *job;
}

std::vector<Job> Engine::jobs_for(const Principal& who, JobFilter filter) const {
    if (!who.is_admin()) {
        filter.owner = who.user_id;
    }
    return store_.jobs(filter);
}

bool Engine::wait_idle(const std::string& device_id, std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        const bool idle = !store_.queue_head(device_id) &&
                          store_.jobs({.status = JobStatus::Running, .device_id = device_id}).empty();
        if (idle) {
            return true;
        }
        if (Clock::now() >= deadline) {
            return false;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

} // namespace qstack
