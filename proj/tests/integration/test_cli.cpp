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

#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <regex>
#include <thread>

#include "support/http_fixture.hpp"
#include "support/process.hpp"

namespace qstack {
namespace {

using nlohmann::json;
using oracle::kAdminKey;
using oracle::ProcessResult;
using oracle::ServerHarness;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        std::ofstream(files.path() / "l1.qasm") << oracle::kHadamardQasm;
        std::ofstream(files.path() / "l2.qasm") << oracle::kBellPairQasm;
        std::ofstream(files.path() / "x.qasm") << "qubit[1] q;\nbit[1] c;\nx q[0];\nc[0] = measure q[0];\n";
        std::ofstream(files.path() / "op.json") << R"([["X 0 X 1", 1.5], ["Y 0 Z 1", 1.2]])";
        std::ofstream(files.path() / "bad_op.json") << R"([["X 0 Q 1", 1.5]])";
    }

    [[nodiscard]] std::string file(const std::string& name) const { return (files.path() / name).string(); }

    ProcessResult cli(std::vector<std::string> args, const std::string& key = kAdminKey) const {
        args.insert(args.begin(), QSTACK_CLI);
        return oracle::run_process(args, {"QSTACK_URL=" + server.server->base_url(), "QSTACK_API_KEY=" + key},
                                   files.path());
    }

    oracle::TempDir files;
    ServerHarness server{true, {}, QSTACK_BIN_DIR};
};

/// Parses the rows "  <key> |###   | <count> <fraction>" of a histogram.
std::map<std::string, int> histogram_rows(const std::string& text) {
    std::map<std::string, int> rows;
    const std::regex row(R"(^\s+([01]+) \|#*\s*\|\s+(\d+)\s+[0-9.]+$)");
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::smatch m;
        if (std::regex_match(line, m, row)) {
            rows[m[1]] = std::stoi(m[2]);
        }
    }
    return rows;
}

TEST_F(Cli, SampleWaitPrintsHistogram) {
    const auto r = cli({"sample", "--qasm", file("l1.qasm"), "--device", "anemone", "--shots", "1000", "--name",
                        "sampling-001", "--wait"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto rows = histogram_rows(r.out);
    ASSERT_EQ(rows.size(), 2U) << r.out;
    for (const auto& [k, v] : rows) {
        EXPECT_GE(v, 450) << k;
        EXPECT_LE(v, 550) << k;
    }
}

TEST_F(Cli, UsageErrorsExitTwo) {
    const auto missing = cli({"sample", "--qasm", file("l1.qasm"), "--shots", "10"});
    EXPECT_EQ(missing.exit_code, 2);
    EXPECT_NE(missing.err.find("--device"), std::string::npos) << missing.err;
    EXPECT_EQ(cli({"estimate", "--qasm", file("l2.qasm"), "--operator", file("op.json"), "--device", "anemone",
                   "--shots", "0"})
                  .exit_code,
              2);
    const auto bad_op = cli({"estimate", "--qasm", file("l2.qasm"), "--operator", file("bad_op.json"), "--device",
                             "anemone", "--shots", "100"});
    EXPECT_EQ(bad_op.exit_code, 2);
    EXPECT_NE(bad_op.err.find("MalformedLabel"), std::string::npos) << bad_op.err;
    EXPECT_EQ(cli({"sample", "--qasm", file("nope.qasm"), "--device", "anemone", "--shots", "10"}).exit_code, 2);
    EXPECT_EQ(cli({"frobnicate"}).exit_code, 2);
}

TEST_F(Cli, AuthAndNetworkFailuresExitThree) {
    const auto bad = cli({"devices", "list"}, "qsk_wrong");
    EXPECT_EQ(bad.exit_code, 3);
    EXPECT_NE(bad.err.find("unauthorized"), std::string::npos) << bad.err;
    const auto down = oracle::run_process({QSTACK_CLI, "--url", "http://127.0.0.1:9", "devices", "list"},
                                          {"QSTACK_API_KEY=x"}, files.path());
    EXPECT_EQ(down.exit_code, 3);
}

TEST_F(Cli, JsonModeEmitsServerJobJsonVerbatim) {
    const auto submitted = cli({"--json", "sample", "--qasm", file("l1.qasm"), "--device", "anemone", "--shots",
                                "100", "--seed", "4", "--wait"});
    ASSERT_EQ(submitted.exit_code, 0) << submitted.err;
    const auto job = json::parse(submitted.out);
    const auto id = job.at("id").get<std::string>();
    const auto server_body = server.api->call("GET", "/jobs/" + id, kAdminKey).raw;
    EXPECT_EQ(submitted.out, server_body + "\n");
    EXPECT_EQ(cli({"--json", "jobs", "show", id}).out, server_body + "\n");
}

TEST_F(Cli, EstimatePrintsValue) {
    const auto r = cli({"estimate", "--qasm", file("l2.qasm"), "--operator", file("op.json"), "--device", "anemone",
                        "--shots", "1000", "--wait"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::smatch m;
    ASSERT_TRUE(std::regex_search(r.out, m, std::regex(R"(value: (-?[0-9.]+))"))) << r.out;
    EXPECT_NEAR(std::stod(m[1]), 0.0, 0.2);
    EXPECT_NE(r.out.find("group [X 0 X 1]"), std::string::npos);
    EXPECT_NE(r.out.find("group [Y 0 Z 1]"), std::string::npos);
}

TEST_F(Cli, MultiPrintsOneHistogramPerCircuitInOrder) {
    const auto r = cli({"multi", "--qasm", file("l1.qasm"), file("x.qasm"), "--device", "anemone", "--shots", "400",
                        "--wait"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto first = r.out.find("circuit 0:");
    const auto second = r.out.find("circuit 1:");
    ASSERT_NE(first, std::string::npos);
    ASSERT_NE(second, std::string::npos);
    EXPECT_LT(first, second);
    const auto tail = histogram_rows(r.out.substr(second));
    EXPECT_EQ(tail, (std::map<std::string, int>{{"1", 400}}));
    EXPECT_EQ(histogram_rows(r.out.substr(first, second - first)).size(), 2U);
}

TEST_F(Cli, CancellingARunningJobExitsOne) {
    const auto opened = server.api->call("POST", "/sessions", kAdminKey, {{"device_id", "coral"}});
    const auto sid = opened.body.at("session_id").get<std::string>();
    for (int i = 0; i < 200 && server.api->call("GET", "/jobs/" + sid, kAdminKey).body.at("status") != "running";
         ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    const auto r = cli({"jobs", "cancel", sid});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.err.find("not cancellable"), std::string::npos) << r.err;
    server.api->call("POST", "/sessions/" + sid + "/close", kAdminKey);

    EXPECT_EQ(cli({"jobs", "show", "no-such-job"}).exit_code, 1);
}

TEST_F(Cli, DevicesShowPrintsTopologyAndReadoutErrors) {
    const auto r = cli({"devices", "show", "anemone"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("64 qubits"), std::string::npos);
    EXPECT_NE(r.out.find("edges: 0-1 0-8 1-2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("readout errors"), std::string::npos);
    const auto list = cli({"devices", "list"});
    EXPECT_NE(list.out.find("coral"), std::string::npos);
}

TEST_F(Cli, SessionRunDrivesTheHybridDemo) {
    std::ofstream(files.path() / "manifest.json") << R"({"command": ["qstack-hybrid-demo"], "timeout_s": 60})";
    const auto r = cli({"session", "run", "--manifest", file("manifest.json"), "--device", "anemone"});
    ASSERT_EQ(r.exit_code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("exit code: 0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("sub-jobs: 3"), std::string::npos) << r.out;
    int streamed = 0;
    for (auto pos = r.out.find("sub-job "); pos != std::string::npos; pos = r.out.find("sub-job ", pos + 1)) {
        ++streamed;
    }
    EXPECT_EQ(streamed, 3);
    EXPECT_NE(r.out.find("iteration 2"), std::string::npos);
}

TEST_F(Cli, ConfigPrecedenceFlagsThenEnvThenFile) {
    const auto cfg = file("config.json");
    std::ofstream(cfg) << json{{"url", server.server->base_url()}, {"api_key", kAdminKey}}.dump();
    const auto from_file = oracle::run_process({QSTACK_CLI, "--config", cfg, "devices", "list"}, {}, files.path());
    EXPECT_EQ(from_file.exit_code, 0) << from_file.err;

    const auto env_beats_file = oracle::run_process({QSTACK_CLI, "--config", cfg, "devices", "list"},
                                                    {"QSTACK_API_KEY=qsk_wrong"}, files.path());
    EXPECT_EQ(env_beats_file.exit_code, 3);

    const auto flag_beats_env =
        oracle::run_process({QSTACK_CLI, "--config", cfg, "--api-key", kAdminKey, "devices", "list"},
                            {"QSTACK_API_KEY=qsk_wrong"}, files.path());
    EXPECT_EQ(flag_beats_env.exit_code, 0) << flag_beats_env.err;
}

TEST_F(Cli, OfflineCommandsUseTheLocalLibrary) {
    const auto canon = cli({"qasm", file("x.qasm")});
    ASSERT_EQ(canon.exit_code, 0);
    EXPECT_EQ(canon.out.rfind("OPENQASM 3;", 0), 0U);
    const auto sim = cli({"--json", "simulate", "--qasm", file("x.qasm"), "--shots", "50"});
    ASSERT_EQ(sim.exit_code, 0) << sim.err;
    EXPECT_EQ(json::parse(sim.out), (json{{"1", 50}}));
    const auto tr = cli({"--json", "transpile", "--qasm", file("l2.qasm"), "--line", "3"});
    ASSERT_EQ(tr.exit_code, 0) << tr.err;
    EXPECT_EQ(json::parse(tr.out).at("metrics").at("two_qubit_count"), 1);
    std::ofstream(files.path() / "broken.qasm") << "qubit[1] q;\nh q[3];\n";
    const auto broken = cli({"qasm", file("broken.qasm")});
    EXPECT_EQ(broken.exit_code, 2);
    EXPECT_NE(broken.err.find("line 2"), std::string::npos) << broken.err;
}

} // namespace
} // namespace qstack
