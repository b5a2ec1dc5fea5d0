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

#include "qstack/program_runner.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

constexpr std::size_t kMaxCapture = 64 * 1024;

class TempFile {
public:
    TempFile() {
        std::string tmpl = "/tmp/qstack-prog-XXXXXX";
        fd_ = mkstemp(tmpl.data());
        if (fd_ < 0) {
            raise(ErrorCode::SpawnFailure, "cannot create capture file");
        }
        path_ = tmpl;
    }
    ~TempFile() {
        if (fd_ >= 0) {
            close(fd_);
        }
        if (!path_.empty()) {
            unlink(path_.c_str());
        }
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    [[nodiscard]] int fd() const { return fd_; }

    [[nodiscard]] std::string read() const {
        std::ifstream in(path_, std::ios::binary);
        std::string data(kMaxCapture, '\0');
        in.read(data.data(), static_cast<std::streamsize>(kMaxCapture));
        data.resize(static_cast<std::size_t>(in.gcount()));
        return data;
    }

private:
    int fd_ = -1;
    std::string path_;
};

std::string resolve(const std::string& program_dir, const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..") {
        raise(ErrorCode::SpawnFailure, fmt::format("'{}' is not a bare program name", name));
    }
    if (program_dir.empty()) {
        raise(ErrorCode::SpawnFailure, "no program directory is configured");
    }
    std::string path = program_dir + "/" + name;
    if (access(path.c_str(), X_OK) != 0) {
        raise(ErrorCode::SpawnFailure, fmt::format("program '{}' not found in {}", name, program_dir));
    }
    return path;
}

} // namespace

ProgramReport run_program(const std::string& program_dir, const std::vector<std::string>& argv,
                          const std::map<std::string, std::string>& env, std::chrono::milliseconds timeout,
                          const std::function<bool()>& abort) {
    if (argv.empty()) {
        raise(ErrorCode::SpawnFailure, "empty command");
    }
    const std::string path = resolve(program_dir, argv.front());

    TempFile out;
    TempFile err;
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_adddup2(&actions, out.fd(), 1);
    posix_spawn_file_actions_adddup2(&actions, err.fd(), 2);
    posix_spawn_file_actions_addchdir_np(&actions, program_dir.c_str());
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGMASK);
    posix_spawnattr_setpgroup(&attr, 0);
    sigset_t empty;
    sigemptyset(&empty);
    posix_spawnattr_setsigmask(&attr, &empty);

    std::vector<std::string> env_strings;
    for (const auto& [k, v] : env) {
        env_strings.push_back(k + "=" + v);
    }
    std::vector<char*> c_argv;
    for (const auto& a : argv) {
        c_argv.push_back(const_cast<char*>(a.c_str()));
    }
    c_argv.push_back(nullptr);
    std::vector<char*> c_env;
    for (auto& e : env_strings) {
        c_env.push_back(e.data());
    }
    c_env.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, path.c_str(), &actions, &attr, c_argv.data(), c_env.data());
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0) {
        raise(ErrorCode::SpawnFailure, fmt::format("cannot start '{}': {}", argv.front(), std::strerror(rc)));
    }

    int status = 0;
    bool timed_out = false;
    bool aborted = false;
    for (;;) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) {
            break;
        }
        if (done < 0 && errno != EINTR) {
            raise(ErrorCode::Internal, fmt::format("waitpid failed: {}", std::strerror(errno)));
        }
        timed_out = std::chrono::steady_clock::now() - start >= timeout;
        aborted = abort && abort();
        if (timed_out || aborted) {
            kill(-pid, SIGKILL);
            while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
            }
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }

    ProgramReport report;
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.stdout_text = out.read();
    report.stderr_text = err.read();
    if (timed_out) {
        raise(ErrorCode::WallClockTimeout,
              fmt::format("program exceeded {} s and was terminated",
                          std::chrono::duration_cast<std::chrono::seconds>(timeout).count()));
    }
    if (aborted) {
        raise(ErrorCode::Internal, "program terminated by host shutdown");
    }
    report.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return report;
}

} // namespace qstack
