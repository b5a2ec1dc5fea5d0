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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace qstack::oracle {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    }
    return out + "'";
}

/// Runs `argv` through /bin/sh with extra environment assignments; captures both streams.
inline ProcessResult run_process(const std::vector<std::string>& argv, const std::vector<std::string>& env = {},
                                 const std::filesystem::path& scratch = std::filesystem::temp_directory_path()) {
    static int counter = 0;
    const auto err_path = scratch / ("stderr-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::string cmd = "env -u QSTACK_URL -u QSTACK_API_KEY -u QSTACK_CONFIG HOME=/nonexistent";
    for (const auto& e : env) {
        cmd += " " + shell_quote(e);
    }
    for (const auto& a : argv) {
        cmd += " " + shell_quote(a);
    }
    cmd += " 2>" + shell_quote(err_path.string());
    ProcessResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, n);
    }
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.err = ss.str();
    std::filesystem::remove(err_path);
    return r;
}

} // namespace qstack::oracle
