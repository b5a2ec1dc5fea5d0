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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <sys/stat.h>
#include <unistd.h>

#include "qstack/engine.hpp"
#include "qstack/records.hpp"

namespace qstack::oracle {

inline const char* kHadamardQasm = R"(OPENQASM 3;
include "stdgates.inc";
qubit[1] q;
bit[1] c;
h q[0];
c[0] = measure q[0];
)";

inline const char* kBellPairQasm = R"(OPENQASM 3;
include "stdgates.inc";
qubit[2] q;
cx q[0], q[1];
)";

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "qstack-test-XXXXXX").string();
        path_ = mkdtemp(tmpl.data());
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

    std::string write_script(const std::string& name, const std::string& body) const {
        const auto p = path_ / name;
        std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
        chmod(p.c_str(), 0755);
        return p.string();
    }

private:
    std::filesystem::path path_;
};

inline JobDraft sampling_draft(const std::string& device, std::uint64_t shots, std::optional<std::uint64_t> seed = {},
                               const std::string& qasm = kHadamardQasm) {
    JobDraft d;
    d.job_type = JobType::Sampling;
    d.device_id = device;
    d.shots = shots;
    d.name = "sampling-001";
    d.payload = {{"qasm", qasm}};
    if (seed) {
        d.options["seed"] = *seed;
    }
    return d;
}

inline JobDraft estimation_draft(const std::string& device, std::uint64_t shots, std::uint64_t seed) {
    JobDraft d;
    d.job_type = JobType::Estimation;
    d.device_id = device;
    d.shots = shots;
    d.payload = {{"qasm", kBellPairQasm},
                 {"operator", nlohmann::json::array({nlohmann::json::array({"X 0 X 1", 1.5}),
                                                     nlohmann::json::array({"Y 0 Z 1", 1.2})})}};
    d.options["seed"] = seed;
    return d;
}

} // namespace qstack::oracle
