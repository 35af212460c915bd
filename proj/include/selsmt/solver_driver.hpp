#pragma once

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace selsmt {

struct SolverConfig {
  std::string executable = "z3";
  std::vector<std::string> extra_args;
  std::chrono::milliseconds timeout{300'000};
  /// Feed the script through the solver's standard input instead of a
  /// temporary file argument.
  bool use_stdin = false;
};

enum class Verdict { Sat, Unsat, Unknown };

const char* to_string(Verdict verdict);

struct VerificationResult {
  Verdict verdict = Verdict::Unknown;
  std::string unknown_reason;  // set when verdict == Unknown
  std::chrono::duration<double> wall_time{0};
  std::string solver_stdout;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { NotFound, Crashed };

  SolverError(Kind kind, std::string message, int exit_status = 0,
              std::string stderr_text = {})
      : std::runtime_error(std::move(message)),
        kind_(kind),
        exit_status_(exit_status),
        stderr_text_(std::move(stderr_text)) {}

  Kind kind() const { return kind_; }
  int exit_status() const { return exit_status_; }
  const std::string& stderr_text() const { return stderr_text_; }

 private:
  Kind kind_;
  int exit_status_;
  std::string stderr_text_;
};

/// Runs the configured solver on the script and classifies its answer.
/// The first output line reading `sat` or `unsat` decides the verdict;
/// anything else (including `unknown` and a fired timeout) is Unknown.
/// Throws SolverError when the solver cannot be started or crashes without
/// producing a verdict.
VerificationResult check(const std::string& script, const SolverConfig& config);

/// Solver executable to use by default: $SELSMT_SOLVER when set, else "z3".
std::string default_solver();

}  // namespace selsmt
