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

#include <chrono>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qstack {

struct ProgramReport {
    int exit_code = 0;
    std::string stdout_text;
    std::string stderr_text;
    double elapsed_seconds = 0.0;
};

/// Launches argv[0] from `program_dir` (bare names only, working directory `program_dir`) in its own process group with
/// exactly `env` as its environment, and waits for it. Output is captured to temporary
/// files and truncated to 64 KiB per stream. `abort` is polled while waiting.
/// Throws SpawnFailure, WallClockTimeout (process group killed first).
ProgramReport run_program(const std::string& program_dir, const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env, std::chrono::milliseconds timeout,
                          const std::function<bool()>& abort = {});

} // namespace qstack
