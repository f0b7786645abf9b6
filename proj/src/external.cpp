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

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <string>

#include "hoist/objectives.hpp"
#include "json.hpp"

namespace hoist {

namespace {

// A write to a child that exited early (an echo-style responder never reads
// its stdin) must not kill the whole run with SIGPIPE.
void ignore_sigpipe_once() {
    static const bool done = [] {
        ::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

struct Pipe {
    int read_fd = -1;
    int write_fd = -1;

    void open() {
        int fds[2];
        if (::pipe(fds) != 0) throw EvaluationFailure("external: pipe() failed");
        read_fd = fds[0];
        write_fd = fds[1];
    }
    void close_read() {
        if (read_fd >= 0) ::close(read_fd);
        read_fd = -1;
    }
    void close_write() {
        if (write_fd >= 0) ::close(write_fd);
        write_fd = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

void write_all_best_effort(int fd, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            return;  // child may have exited without reading; its output decides
        }
        off += static_cast<std::size_t>(n);
    }
}

// Reads until the first newline or EOF, within the deadline. Returns false on
// timeout.
bool read_response_line(int fd, std::chrono::steady_clock::time_point deadline,
                        std::string& line) {
    char buf[512];
    while (true) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                             deadline - std::chrono::steady_clock::now())
                             .count();
        if (remaining <= 0) return false;

        struct pollfd pfd{fd, POLLIN, 0};
        int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw EvaluationFailure("external: poll() failed");
        }
        if (ready == 0) return false;

        ssize_t n = ::read(fd, buf, sizeof(buf));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw EvaluationFailure("external: read() failed");
        }
        if (n == 0) return true;  // EOF: whatever arrived is the response
        line.append(buf, static_cast<std::size_t>(n));
        if (line.find('\n') != std::string::npos) return true;
    }
}

int wait_for_exit(pid_t pid) {
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw EvaluationFailure("external: waitpid() failed");
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;  // killed by a signal
}

// Reaps the child within the deadline; a responder that lingers past its
// invocation budget is killed and reported as a timeout.
int wait_for_exit_deadline(pid_t pid, std::chrono::steady_clock::time_point deadline,
                           bool& timed_out) {
    timed_out = false;
    while (true) {
        int status = 0;
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw EvaluationFailure("external: waitpid() failed");
        }
        if (r == pid) {
            if (WIFEXITED(status)) return WEXITSTATUS(status);
            return -1;
        }
        if (std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            ::kill(pid, SIGKILL);
            return wait_for_exit(pid);
        }
        ::usleep(1000);
    }
}

}  // namespace

double eval_external(const std::string& command, const Configuration& config, double resource,
                     double max_resource, double timeout_secs) {
    if (!(timeout_secs > 0.0)) throw std::invalid_argument("external: timeout must be > 0");
    ignore_sigpipe_once();

    nlohmann::json request{{"config", config_values_to_json(config)},
                           {"resource", resource},
                           {"max_resource", max_resource}};
    const std::string request_line = request.dump() + "\n";

    Pipe to_child;
    Pipe from_child;
    to_child.open();
    from_child.open();

    pid_t pid = ::fork();
    if (pid < 0) throw EvaluationFailure("external: fork() failed");
    if (pid == 0) {
        ::dup2(to_child.read_fd, STDIN_FILENO);
        ::dup2(from_child.write_fd, STDOUT_FILENO);
        ::close(to_child.read_fd);
        ::close(to_child.write_fd);
        ::close(from_child.read_fd);
        ::close(from_child.write_fd);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    to_child.close_read();
    from_child.close_write();

    write_all_best_effort(to_child.write_fd, request_line);
    to_child.close_write();

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_secs));
    std::string output;
    const bool completed = read_response_line(from_child.read_fd, deadline, output);
    from_child.close_read();

    if (!completed) {
        ::kill(pid, SIGKILL);
        wait_for_exit(pid);
        throw EvaluationFailure("external: timeout after " + std::to_string(timeout_secs) +
                                "s running '" + command + "'");
    }

    bool timed_out = false;
    const int exit_code = wait_for_exit_deadline(pid, deadline, timed_out);
    if (timed_out)
        throw EvaluationFailure("external: timeout after " + std::to_string(timeout_secs) +
                                "s running '" + command + "'");
    if (exit_code != 0)
        throw EvaluationFailure("external: command '" + command + "' exited with status " +
                                std::to_string(exit_code));

    const std::size_t end = output.find('\n');
    const std::string first_line = end == std::string::npos ? output : output.substr(0, end);
    nlohmann::json response = nlohmann::json::parse(first_line, nullptr, false);
    if (response.is_discarded() || !response.is_object() || !response.contains("loss") ||
        !response["loss"].is_number())
        throw EvaluationFailure("external: malformed response '" + first_line + "'");
    const double loss = response["loss"].get<double>();
    if (!std::isfinite(loss))
        throw EvaluationFailure("external: non-finite loss in response '" + first_line + "'");
    return loss;
}

}  // namespace hoist
