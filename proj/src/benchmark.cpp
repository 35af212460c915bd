#include "selsmt/benchmark.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "selsmt/pipeline.hpp"
#include "selsmt/policy_model.hpp"

namespace selsmt {

GeneratedBenchmark generate(const BenchmarkSpec& spec) {
  if (spec.n < 1) {
    throw PolicyError(PolicyErrorCode::InvalidParameter,
                      "benchmark size must be at least 1");
  }
  const int n = spec.n;
  std::ostringstream policy;
  for (int i = 0; i < n; ++i) policy << "class class_" << i << "\n";
  policy << "\nsid unlabeled\n\n";
  for (int i = 0; i < n; ++i) {
    policy << "class class_" << i << "\n{\n";
    for (int j = 0; j < BenchmarkSpec::kPermsPerClass; ++j) {
      policy << "    class_" << i << "_perm_" << j << "\n";
    }
    policy << "}\n";
  }
  policy << "\n";
  for (int i = 0; i < n; ++i) {
    policy << "role role_" << i << ";\n";
    policy << "type role_type_" << i << ";\n";
    policy << "role role_" << i << " types role_type_" << i << ";\n";
  }
  policy << "\n";
  for (int i = 0; i < n; ++i) policy << "type type_" << i << ";\n";
  policy << "\n";
  for (int i = 0; i < n; ++i) {
    policy << "allow role_type_" << i << " type_" << i << " : class_" << i
           << " {";
    for (int j = 0; j < BenchmarkSpec::kPermsPerClass; ++j) {
      policy << " class_" << i << "_perm_" << j;
    }
    policy << " };\n";
  }
  policy << "\n";
  for (int i = 0; i < n; ++i) {
    policy << "user user_" << i << " roles { role_" << i << " };\n";
  }
  policy << "\nsid unlabeled user_0:object_r:type_0\n";

  // Every type of every role of any user holding role_0 is granted
  // (type_0, class_0, class_0_perm_0); the generated rules satisfy this.
  std::string constraint =
      "(assert (forall ((u User))\n"
      "  (=> (user-has-role u role_0_r)\n"
      "      (forall ((r Role))\n"
      "        (=> (user-has-role u r)\n"
      "            (forall ((t Type))\n"
      "              (=> (role-has-type r t)\n"
      "                  (av-allow t type_0_t class_0 class_0_perm_0))))))))"
      "\n";

  return {policy.str(), std::move(constraint)};
}

namespace {

BenchmarkRecord run_row(int n, const SolverConfig& solver, int repeat,
                        const std::optional<std::string>& artifacts_dir) {
  GeneratedBenchmark bench = generate({n});
  if (artifacts_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(*artifacts_dir);
    std::ofstream(fs::path(*artifacts_dir) /
                  ("bench_" + std::to_string(n) + ".te"))
        << bench.policy;
    std::ofstream(fs::path(*artifacts_dir) /
                  ("bench_" + std::to_string(n) + "_constraint.smt2"))
        << bench.constraint;
  }
  BenchmarkRecord record;
  record.n = n;
  for (int run = 0; run < repeat; ++run) {
    VerifyReport report =
        run_pipeline(bench.policy, {bench.constraint}, solver);
    if (run == 0) {
      record.parse_seconds = report.parse_seconds;
      record.encode_seconds = report.encode_seconds;
      record.solve_seconds = report.solve_seconds;
    } else {
      record.parse_seconds = std::min(record.parse_seconds,
                                      report.parse_seconds);
      record.encode_seconds = std::min(record.encode_seconds,
                                       report.encode_seconds);
      record.solve_seconds = std::min(record.solve_seconds,
                                      report.solve_seconds);
    }
    record.verdict = report.solver_ran ? report.verdict : Verdict::Unknown;
  }
  return record;
}

}  // namespace

std::vector<BenchmarkRecord> run_sweep(std::span<const int> ns,
                                       const SolverConfig& solver,
                                       const SweepOptions& options) {
  if (ns.empty()) {
    throw PolicyError(PolicyErrorCode::InvalidParameter,
                      "at least one benchmark size is required");
  }
  for (int n : ns) {
    if (n < 1) {
      throw PolicyError(PolicyErrorCode::InvalidParameter,
                        "benchmark size must be at least 1");
    }
  }
  int repeat = std::max(1, options.repeat);
  std::vector<BenchmarkRecord> records;
  if (options.parallel) {
    std::vector<std::future<BenchmarkRecord>> rows;
    rows.reserve(ns.size());
    for (int n : ns) {
      rows.push_back(std::async(std::launch::async, run_row, n, solver,
                                repeat, options.artifacts_dir));
    }
    for (auto& row : rows) records.push_back(row.get());
  } else {
    // Sequential by default to keep timings uncontended.
    for (int n : ns) {
      records.push_back(run_row(n, solver, repeat, options.artifacts_dir));
    }
  }
  return records;
}

std::string to_csv(const std::vector<BenchmarkRecord>& records) {
  std::ostringstream out;
  out << "n,parse_s,encode_s,solve_s,verdict\n";
  for (const auto& record : records) {
    out << record.n << "," << record.parse_seconds << ","
        << record.encode_seconds << "," << record.solve_seconds << ","
        << to_string(record.verdict) << "\n";
  }
  return out.str();
}

}  // namespace selsmt
