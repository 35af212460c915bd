#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selsmt/solver_driver.hpp"

namespace selsmt {

/// Parameters of the synthetic policy family: n classes (3 permissions
/// each), n roles, n users, n allow rules and 2n types, paired with one
/// satisfiable constraint.
struct BenchmarkSpec {
  int n = 1;
  static constexpr int kPermsPerClass = 3;

  int types_count() const { return 2 * n; }
};

struct GeneratedBenchmark {
  std::string policy;
  std::string constraint;
};

/// Emits the synthetic policy/constraint pair for the given size.
/// Throws PolicyError(InvalidParameter) for n < 1.
GeneratedBenchmark generate(const BenchmarkSpec& spec);

struct BenchmarkRecord {
  int n = 0;
  double parse_seconds = 0;
  double encode_seconds = 0;
  double solve_seconds = 0;
  Verdict verdict = Verdict::Unknown;
};

struct SweepOptions {
  int repeat = 1;  // phases are re-run `repeat` times; minima are reported
  bool parallel = false;
  std::optional<std::string> artifacts_dir;  // keep generated inputs here
};

/// Generates, parses, encodes and solves one benchmark per entry of `ns`.
/// Solver failures are recorded as Unknown verdicts instead of aborting
/// the sweep. Throws PolicyError(InvalidParameter) when `ns` is empty or
/// contains a non-positive entry.
std::vector<BenchmarkRecord> run_sweep(std::span<const int> ns,
                                       const SolverConfig& solver,
                                       const SweepOptions& options = {});

/// CSV rendering with header `n,parse_s,encode_s,solve_s,verdict`.
std::string to_csv(const std::vector<BenchmarkRecord>& records);

}  // namespace selsmt
