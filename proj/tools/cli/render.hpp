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

#include <string>

#include <nlohmann/json.hpp>

namespace qstack::cli {

/// ASCII bar chart of a `{bitstring: count}` object, one row per outcome in key order.
std::string histogram(const nlohmann::json& counts, int width = 40);

/// Human summary of a job record, including result rendering for terminal jobs.
std::string describe_job(const nlohmann::json& job);

/// One line per job: id, type, status, device, name.
std::string job_table(const nlohmann::json& jobs);

std::string describe_device(const nlohmann::json& device);
std::string device_table(const nlohmann::json& devices);

} // namespace qstack::cli
