// Copyright 2026 The Sizeprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sizeprobe/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

namespace sizeprobe {

namespace {

constexpr std::size_t kMaxCapturedBytes = 4 * 1024 * 1024;

void drainFd(int fd, std::string& sink) {
  char buf[8192];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n <= 0) break;
    if (sink.size() < kMaxCapturedBytes) {
      sink.append(buf, buf + std::min<std::size_t>(n, kMaxCapturedBytes - sink.size()));
    }
  }
}

}  // namespace

std::vector<std::string> splitCommand(const std::string& command) {
  std::vector<std::string> argv;
  std::string token;
  for (char c : command) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) {
        argv.push_back(token);
        token.clear();
      }
    } else {
      token.push_back(c);
    }
  }
  if (!token.empty()) argv.push_back(token);
  return argv;
}

std::string substitutePlaceholders(const std::string& templ,
                                   const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(templ.size());
  std::size_t pos = 0;
  while (pos < templ.size()) {
    std::size_t open = templ.find('{', pos);
    if (open == std::string::npos) {
      out.append(templ, pos, std::string::npos);
      break;
    }
    std::size_t close = templ.find('}', open);
    out.append(templ, pos, open - pos);
    // Braces that do not wrap a known key (code braces, one-sided braces)
    // pass through untouched.
    if (close == std::string::npos) {
      out.append(templ, open, std::string::npos);
      break;
    }
    std::string key = templ.substr(open + 1, close - open - 1);
    auto it = values.find(key);
    if (it != values.end()) {
      out += it->second;
      pos = close + 1;
    } else {
      out.push_back('{');
      pos = open + 1;
    }
  }
  return out;
}

bool binaryExists(const std::string& name) {
  if (name.empty()) return false;
  auto executable = [](const std::string& path) {
    struct stat st{};
    return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
           ::access(path.c_str(), X_OK) == 0;
  };
  if (name.find('/') != std::string::npos) return executable(name);
  const char* raw_path = std::getenv("PATH");
  if (raw_path == nullptr) return false;
  std::stringstream path_stream(raw_path);
  std::string dir;
  while (std::getline(path_stream, dir, ':')) {
    if (dir.empty()) continue;
    if (executable(dir + "/" + name)) return true;
  }
  return false;
}

RunResult runCommand(const std::vector<std::string>& argv, double timeout_seconds,
                     const std::string& cwd) {
  RunResult result;
  if (argv.empty()) {
    result.spawn_failed = true;
    result.err = "empty argv";
    return result;
  }

  int out_pipe[2];
  int err_pipe[2];
  if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
    result.spawn_failed = true;
    result.err = std::string("pipe: ") + std::strerror(errno);
    return result;
  }

  auto start = std::chrono::steady_clock::now();
  pid_t pid = ::fork();
  if (pid < 0) {
    result.spawn_failed = true;
    result.err = std::string("fork: ") + std::strerror(errno);
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    return result;
  }

  if (pid == 0) {
    ::setpgid(0, 0);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) _exit(126);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    // Exec failed; 127 is the conventional not-found status.
    const char* msg = "exec failed: ";
    ssize_t ignored = ::write(STDERR_FILENO, msg, std::strlen(msg));
    ignored = ::write(STDERR_FILENO, args[0], std::strlen(args[0]));
    (void)ignored;
    _exit(127);
  }

  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));
  bool out_open = true;
  bool err_open = true;
  bool killed = false;

  while (out_open || err_open) {
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

    auto now = std::chrono::steady_clock::now();
    int wait_ms = 0;
    if (now < deadline) {
      wait_ms = static_cast<int>(
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      wait_ms = std::max(wait_ms, 1);
    } else if (!killed) {
      ::kill(-pid, SIGKILL);
      killed = true;
      result.timed_out = true;
      wait_ms = 100;
    } else {
      wait_ms = 100;
    }

    int ready = ::poll(fds, nfds, wait_ms);
    if (ready < 0 && errno != EINTR) break;
    if (ready > 0) {
      for (nfds_t i = 0; i < nfds; ++i) {
        if ((fds[i].revents & (POLLIN | POLLHUP | POLLERR)) == 0) continue;
        bool is_out = fds[i].fd == out_pipe[0];
        char buf[8192];
        ssize_t n;
        while ((n = ::read(fds[i].fd, buf, sizeof(buf))) > 0) {
          std::string& sink = is_out ? result.out : result.err;
          if (sink.size() < kMaxCapturedBytes) {
            sink.append(buf, buf + std::min<std::size_t>(n, kMaxCapturedBytes - sink.size()));
          }
        }
        if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
          if (is_out) {
            out_open = false;
          } else {
            err_open = false;
          }
        }
      }
    }
  }

  drainFd(out_pipe[0], result.out);
  drainFd(err_pipe[0], result.err);
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  auto end = std::chrono::steady_clock::now();
  result.wall_seconds = std::chrono::duration<double>(end - start).count();
  if (result.timed_out) {
    result.wall_seconds = std::min(result.wall_seconds, timeout_seconds);
  }

  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
    if (result.exit_code == 127 && result.err.find("exec failed") != std::string::npos) {
      result.spawn_failed = true;
    }
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace sizeprobe
