#include <chrono>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "selsmt/solver_driver.hpp"
#include "support/test_env.hpp"

using namespace selsmt;
namespace st = selsmt::testing;

namespace {

const std::string kSatScript =
    "(declare-const x Bool)\n(assert (or x (not x)))\n(check-sat)\n";
const std::string kUnsatScript =
    "(declare-const x Bool)\n(assert (and x (not x)))\n(check-sat)\n";
// No positive cube sums to a cube; z3 cannot settle this and runs until
// stopped, which makes it a reliable timeout probe.
const std::string kHardScript =
    "(declare-const x Int)\n(declare-const y Int)\n(declare-const z Int)\n"
    "(assert (> x 0))\n(assert (> y 0))\n(assert (> z 0))\n"
    "(assert (= (+ (* x x x) (* y y y)) (* z z z)))\n(check-sat)\n";

}  // namespace

TEST_CASE("classifies sat and unsat answers") {
  auto config = st::solver_config();
  auto sat = check(kSatScript, config);
  CHECK(sat.verdict == Verdict::Sat);
  CHECK(sat.wall_time.count() > 0);
  CHECK(sat.solver_stdout.starts_with("sat"));
  CHECK(check(kUnsatScript, config).verdict == Verdict::Unsat);
}

TEST_CASE("stdin transport gives the same answers") {
  auto config = st::solver_config();
  config.use_stdin = true;
  CHECK(check(kSatScript, config).verdict == Verdict::Sat);
  CHECK(check(kUnsatScript, config).verdict == Verdict::Unsat);
}

TEST_CASE("missing executable raises SolverNotFound") {
  SolverConfig config;
  config.executable = "/nonexistent/smt-solver";
  CHECK_THROWS_WITH_AS(check(kSatScript, config),
                       doctest::Contains("/nonexistent/smt-solver"),
                       SolverError);
  try {
    check(kSatScript, config);
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::NotFound);
  }
}

TEST_CASE("timeout yields Unknown within the grace period") {
  auto config = st::solver_config();
  config.timeout = std::chrono::seconds(3);
  auto start = std::chrono::steady_clock::now();
  auto result = check(kHardScript, config);
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(result.verdict == Verdict::Unknown);
  CHECK(result.unknown_reason == "timeout");
  CHECK(elapsed < std::chrono::seconds(20));
}

TEST_CASE("zero exit without a verdict is Unknown") {
  SolverConfig config;
  config.executable = "/bin/echo";
  config.extra_args = {"no-verdict-here"};
  auto result = check(kSatScript, config);
  CHECK(result.verdict == Verdict::Unknown);
  CHECK(result.unknown_reason == "unrecognised solver output");
}

TEST_CASE("nonzero exit without a verdict raises Crashed") {
  SolverConfig config;
  config.executable = "/bin/sh";
  config.extra_args = {"-c", "echo boom >&2; exit 3"};
  try {
    check(kSatScript, config);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::Crashed);
    CHECK(e.exit_status() == 3);
    CHECK(e.stderr_text().find("boom") != std::string::npos);
  }
}

TEST_CASE("default solver honours SELSMT_SOLVER") {
  const char* saved = std::getenv("SELSMT_SOLVER");
  std::string previous = saved ? saved : "";
  setenv("SELSMT_SOLVER", "/opt/custom/solver", 1);
  CHECK(default_solver() == "/opt/custom/solver");
  if (saved) {
    setenv("SELSMT_SOLVER", previous.c_str(), 1);
  } else {
    unsetenv("SELSMT_SOLVER");
    CHECK(default_solver() == "z3");
  }
}
