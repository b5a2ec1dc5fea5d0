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

#include "render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace qstack::cli {

using nlohmann::json;

std::string histogram(const json& counts, int width) {
    if (!counts.is_object() || counts.empty()) {
        return "  (no counts)\n";
    }
    double total = 0.0;
    std::size_t key_width = 0;
    for (const auto& [k, v] : counts.items()) {
        total += v.get<double>();
        key_width = std::max(key_width, k.size());
    }
    std::string out;
    for (const auto& [k, v] : counts.items()) {
        const double frac = total > 0.0 ? v.get<double>() / total : 0.0;
        const auto bar = static_cast<std::size_t>(std::lround(frac * width));
        out += fmt::format("  {:>{}} |{:<{}}| {:>8} {:6.3f}\n", k, key_width, std::string(bar, '#'),
                           static_cast<std::size_t>(width), v.dump(), frac);
    }
    return out;
}

namespace {

std::string describe_estimation(const json& r) {
    std::string out = fmt::format("value: {:.6f}\n", r.at("value").get<double>());
    if (r.value("identity_constant", 0.0) != 0.0) {
        out += fmt::format("identity constant: {}\n", r.at("identity_constant").get<double>());
    }
    for (const auto& g : r.value("per_group", json::array())) {
        out += fmt::format("group [{}] shots={}\n", g.value("basis", std::string{}), g.value("shots", 0));
        const auto terms = g.value("terms", json::array());
        const auto values = g.value("term_expectations", json::array());
        for (std::size_t i = 0; i < terms.size() && i < values.size(); ++i) {
            out += fmt::format("  {:<20} coeff={:<10} <P>={:.6f}\n", terms[i].at(0).get<std::string>(),
                               terms[i].at(1).get<double>(), values[i].get<double>());
        }
    }
    return out;
}

std::string describe_result(const json& job) {
    const auto& r = job.at("result");
    const auto type = job.value("job_type", std::string{});
    std::string out;
    if (type == "sampling") {
        out += fmt::format("seed: {}\ncounts:\n", r.value("seed", json{}).dump());
        out += histogram(r.at("counts"));
        if (r.contains("counts_mitigated")) {
            out += "mitigated:\n" + histogram(r.at("counts_mitigated"));
        }
    } else if (type == "estimation") {
        out += describe_estimation(r);
    } else if (type == "multi_manual") {
        const auto& results = r.at("results");
        for (std::size_t i = 0; i < results.size(); ++i) {
            out += fmt::format("circuit {}:\n", i) + histogram(results[i]);
        }
    } else if (type == "session") {
        out += fmt::format("exit code: {}\nsub-jobs: {}\n", r.value("exit_code", json{}).dump(),
                           r.value("sub_jobs", json::array()).size());
        const auto text = r.value("stdout", std::string{});
        if (!text.empty()) {
            out += "stdout:\n" + text + (text.back() == '\n' ? "" : "\n");
        }
    }
    return out;
}

} // namespace

std::string describe_job(const json& job) {
    std::string out = fmt::format("job {} [{}] {}\n", job.value("id", std::string{}),
                                  job.value("job_type", std::string{}), job.value("status", std::string{}));
    out += fmt::format("device: {}  shots: {}  owner: {}\n", job.value("device_id", std::string{}),
                       job.value("shots", 0), job.value("owner", std::string{}));
    if (!job.value("name", std::string{}).empty()) {
        out += fmt::format("name: {}\n", job.at("name").get<std::string>());
    }
    if (job.value("status", std::string{}) == "failed") {
        out += fmt::format("error: {}\n", job.value("error_message", std::string{}));
    }
    if (job.contains("result") && job.at("result").is_object()) {
        out += describe_result(job);
    }
    return out;
}

std::string job_table(const json& jobs) {
    std::string out = fmt::format("{:<38} {:<13} {:<10} {:<12} {}\n", "ID", "TYPE", "STATUS", "DEVICE", "NAME");
    for (const auto& j : jobs) {
        out += fmt::format("{:<38} {:<13} {:<10} {:<12} {}\n", j.value("id", std::string{}),
                           j.value("job_type", std::string{}), j.value("status", std::string{}),
                           j.value("device_id", std::string{}), j.value("name", std::string{}));
    }
    return out;
}

std::string describe_device(const json& d) {
    std::string out = fmt::format("device {} ({} qubits) {}\n", d.value("id", std::string{}), d.value("n_qubits", 0),
                                  d.value("status", std::string{}));
    std::string basis;
    for (const auto& g : d.value("basis_gates", json::array())) {
        basis += (basis.empty() ? "" : ", ") + g.get<std::string>();
    }
    out += fmt::format("basis gates: {}\n", basis);
    std::string edges;
    for (const auto& e : d.value("edges", json::array())) {
        edges += fmt::format("{}{}-{}", edges.empty() ? "" : " ", e.at(0).get<int>(), e.at(1).get<int>());
    }
    out += fmt::format("edges: {}\n", edges);
    out += "readout errors (qubit: eps01 eps10):\n";
    const auto ro = d.value("readout_errors", json::array());
    for (std::size_t q = 0; q < ro.size(); ++q) {
        out += fmt::format("  {:>3}: {:.4f} {:.4f}\n", q, ro[q].value("eps01", 0.0), ro[q].value("eps10", 0.0));
    }
    if (d.contains("calibration") && d.at("calibration").is_object()) {
        out += fmt::format("calibrated at: {}\n", d.at("calibration").value("calibrated_at", std::string{}));
    }
    return out;
}

std::string device_table(const json& devices) {
    std::string out = fmt::format("{:<16} {:>7} {:<12}\n", "ID", "QUBITS", "STATUS");
    for (const auto& d : devices) {
        out += fmt::format("{:<16} {:>7} {:<12}\n", d.value("id", std::string{}), d.value("n_qubits", 0),
                           d.value("status", std::string{}));
    }
    return out;
}

} // namespace qstack::cli
