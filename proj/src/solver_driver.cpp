#include "selsmt/solver_driver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>

namespace selsmt {

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string default_solver() {
  if (const char* env = std::getenv("SELSMT_SOLVER"); env && *env) {
    return env;
  }
  return "z3";
}

namespace {

struct Pipe {
  int fds[2] = {-1, -1};

  Pipe() {
    if (pipe(fds) != 0) {
      throw SolverError(SolverError::Kind::Crashed,
                        std::string("pipe(): ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  int read_end() const { return fds[0]; }
  int write_end() const { return fds[1]; }
  void close_read() {
    if (fds[0] >= 0) ::close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) ::close(fds[1]);
    fds[1] = -1;
  }
};

class TempScript {
 public:
  explicit TempScript(const std::string& contents) {
    const char* tmpdir = std::getenv("TMPDIR");
    path_ = std::string(tmpdir && *tmpdir ? tmpdir : "/tmp") +
            "/selsmt-XXXXXX.smt2";
    int fd = mkstemps(path_.data(), 5);
    if (fd < 0) {
      throw SolverError(SolverError::Kind::Crashed,
                        std::string("mkstemps(): ") + std::strerror(errno));
    }
    std::size_t written = 0;
    while (written < contents.size()) {
      ssize_t n = ::write(fd, contents.data() + written,
                          contents.size() - written);
      if (n < 0) {
        ::close(fd);
        throw SolverError(SolverError::Kind::Crashed,
                          std::string("write(): ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempScript() { ::unlink(path_.c_str()); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// First output line that is exactly sat/unsat/unknown.
bool classify(const std::string& output, VerificationResult& result) {
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "sat") {
      result.verdict = Verdict::Sat;
      return true;
    }
    if (line == "unsat") {
      result.verdict = Verdict::Unsat;
      return true;
    }
    if (line == "unknown") {
      result.verdict = Verdict::Unknown;
      result.unknown_reason = "solver reported unknown";
      return true;
    }
  }
  return false;
}

}  // namespace

VerificationResult check(const std::string& script,
                         const SolverConfig& config) {
  if (config.timeout.count() <= 0) {
    throw SolverError(SolverError::Kind::Crashed, "timeout must be positive");
  }

  std::unique_ptr<TempScript> temp;
  std::vector<std::string> args{config.executable};
  args.insert(args.end(), config.extra_args.begin(), config.extra_args.end());
  if (!config.use_stdin) {
    temp = std::make_unique<TempScript>(script);
    args.push_back(temp->path());
  }

  Pipe in, out, err;
  auto started = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    throw SolverError(SolverError::Kind::Crashed,
                      std::string("fork(): ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(in.read_end(), STDIN_FILENO);
    dup2(out.write_end(), STDOUT_FILENO);
    dup2(err.write_end(), STDERR_FILENO);
    in.close_read();
    in.close_write();
    out.close_read();
    out.close_write();
    err.close_read();
    err.close_write();
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (auto& arg : args) argv.push_back(arg.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }

  in.close_read();
  out.close_write();
  err.close_write();

  if (config.use_stdin) {
    std::size_t written = 0;
    while (written < script.size()) {
      ssize_t n = ::write(in.write_end(), script.data() + written,
                          script.size() - written);
      if (n < 0) break;  // solver closed its input early
      written += static_cast<std::size_t>(n);
    }
  }
  in.close_write();

  std::string stdout_text, stderr_text;
  bool timed_out = false;
  auto deadline = started + config.timeout;
  bool out_open = true, err_open = true;
  char buffer[4096];
  while (out_open || err_open) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - now);
    struct pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out.read_end(), POLLIN, 0};
    if (err_open) fds[nfds++] = {err.read_end(), POLLIN, 0};
    int ready = poll(fds, nfds, static_cast<int>(remaining.count()) + 1);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) continue;  // re-check the deadline
    for (nfds_t i = 0; i < nfds; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      ssize_t n = ::read(fds[i].fd, buffer, sizeof(buffer));
      bool is_stdout = fds[i].fd == out.read_end();
      if (n > 0) {
        (is_stdout ? stdout_text : stderr_text).append(buffer, n);
      } else {
        (is_stdout ? out_open : err_open) = false;
      }
    }
  }

  int status = 0;
  if (timed_out) {
    kill(pid, SIGKILL);
  }
  waitpid(pid, &status, 0);
  auto wall = std::chrono::steady_clock::now() - started;

  VerificationResult result;
  result.wall_time = wall;
  result.solver_stdout = stdout_text;

  if (timed_out) {
    result.verdict = Verdict::Unknown;
    result.unknown_reason = "timeout";
    return result;
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
    throw SolverError(SolverError::Kind::NotFound,
                      "solver executable not found: " + config.executable);
  }
  if (classify(stdout_text, result)) return result;
  if (WIFSIGNALED(status)) {
    throw SolverError(SolverError::Kind::Crashed,
                      "solver killed by signal " +
                          std::to_string(WTERMSIG(status)),
                      -WTERMSIG(status), stderr_text);
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) != 0) {
    throw SolverError(SolverError::Kind::Crashed,
                      "solver exited with status " +
                          std::to_string(WEXITSTATUS(status)),
                      WEXITSTATUS(status), stderr_text);
  }
  result.verdict = Verdict::Unknown;
  result.unknown_reason = "unrecognised solver output";
  return result;
}

}  // namespace selsmt
