// selsmt: parses an SELinux policy subset, compiles it to SMT-LIB2 together
// with user-supplied constraints, and asks an external SMT solver whether
// the policy is consistent with the specification.
//
// Exit codes: 0 policy consistent (sat), 1 specification violated (unsat),
// 2 verdict unknown, 3 parse/validation/IO error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "selsmt/benchmark.hpp"
#include "selsmt/pipeline.hpp"

namespace {

using nlohmann::json;

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

struct CommonOptions {
  std::string policy_path;
  std::vector<std::string> constraint_paths;
  std::string solver = selsmt::default_solver();
  std::vector<std::string> solver_args;
  double timeout_seconds = 300;
  std::string format = "human";
  std::string emit_path;
  bool distinct = false;
  bool solver_stdin = false;
};

void add_solver_flags(CLI::App& cmd, CommonOptions& options) {
  cmd.add_option("--solver", options.solver,
                 "Solver executable (default: $SELSMT_SOLVER or z3)");
  cmd.add_option("--solver-arg", options.solver_args,
                 "Extra solver argument (repeatable)");
  cmd.add_option("--timeout", options.timeout_seconds,
                 "Solver timeout in seconds")
      ->check(CLI::PositiveNumber);
  cmd.add_flag("--solver-stdin", options.solver_stdin,
               "Feed the script via stdin instead of a temporary file");
}

void add_input_flags(CLI::App& cmd, CommonOptions& options) {
  cmd.add_option("--policy", options.policy_path, "Policy file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_option("--constraints", options.constraint_paths,
                 "SMT-LIB2 constraint fragment (repeatable; spliced in "
                 "order)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--emit-smt", options.emit_path,
                 "Also write the generated script to this path");
  cmd.add_flag("--distinct", options.distinct,
               "Assert pairwise distinctness of class and permission "
               "constants");
}

selsmt::SolverConfig solver_config(const CommonOptions& options) {
  selsmt::SolverConfig config;
  config.executable = options.solver;
  config.extra_args = options.solver_args;
  config.timeout = std::chrono::milliseconds(
      static_cast<long long>(options.timeout_seconds * 1000));
  config.use_stdin = options.solver_stdin;
  return config;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json errors_to_json(const selsmt::VerifyReport& report) {
  json errors = json::array();
  for (const auto& error : report.parse_errors) {
    const char* kind = "semantic";
    if (error.kind == selsmt::ParseErrorKind::Lex) kind = "lex";
    if (error.kind == selsmt::ParseErrorKind::Syntax) kind = "syntax";
    errors.push_back({{"line", error.span.line},
                      {"column", error.span.column},
                      {"message", error.message},
                      {"kind", kind}});
  }
  for (const auto& error : report.constraint_errors) {
    errors.push_back({{"line", error.line},
                      {"column", error.column},
                      {"message", error.message},
                      {"kind", "constraint"}});
  }
  return errors;
}

int report_exit_code(const selsmt::VerifyReport& report) {
  if (!report.input_ok || !report.solver_error.empty()) return kExitError;
  if (!report.solver_ran) return kExitError;
  switch (report.verdict) {
    case selsmt::Verdict::Sat: return kExitSat;
    case selsmt::Verdict::Unsat: return kExitUnsat;
    case selsmt::Verdict::Unknown: return kExitUnknown;
  }
  return kExitError;
}

void print_human(const selsmt::VerifyReport& report, int exit_code) {
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  for (const auto& error : report.parse_errors) {
    std::cerr << selsmt::format_error(error) << "\n";
  }
  for (const auto& error : report.constraint_errors) {
    std::cerr << selsmt::format_error(error) << "\n";
  }
  if (!report.solver_error.empty()) {
    std::cerr << "solver error: " << report.solver_error << "\n";
  }
  if (exit_code == kExitError) {
    std::cout << "error\n";
    return;
  }
  std::cout << to_string(report.verdict);
  switch (report.verdict) {
    case selsmt::Verdict::Sat:
      std::cout << "  (policy consistent with specification)";
      break;
    case selsmt::Verdict::Unsat:
      std::cout << "  (specification violated)";
      break;
    case selsmt::Verdict::Unknown:
      std::cout << "  (" << report.unknown_reason << ")";
      break;
  }
  std::cout << "\nparse " << report.parse_seconds << " s, encode "
            << report.encode_seconds << " s, solve " << report.solve_seconds
            << " s\n";
}

void print_json(const std::string& subcommand,
                const selsmt::VerifyReport& report, int exit_code) {
  json doc = {
      {"subcommand", subcommand},
      {"exit_code", exit_code},
      {"verdict",
       exit_code == kExitError ? "error" : to_string(report.verdict)},
      {"timings",
       {{"parse_s", report.parse_seconds},
        {"encode_s", report.encode_seconds},
        {"solve_s", report.solve_seconds}}},
      {"errors", errors_to_json(report)},
      {"warnings", report.warnings},
  };
  if (report.verdict == selsmt::Verdict::Unknown && report.solver_ran) {
    doc["unknown_reason"] = report.unknown_reason;
  }
  if (!report.solver_error.empty()) {
    doc["solver_error"] = report.solver_error;
  }
  std::cout << doc.dump(2) << "\n";
}

int run_verify_like(const CommonOptions& options, bool run_solver,
                    const std::string& subcommand) {
  auto policy = read_file(options.policy_path);
  if (!policy) {
    std::cerr << "cannot read " << options.policy_path << "\n";
    return kExitError;
  }
  std::vector<std::string> constraints;
  for (const auto& path : options.constraint_paths) {
    auto text = read_file(path);
    if (!text) {
      std::cerr << "cannot read " << path << "\n";
      return kExitError;
    }
    constraints.push_back(std::move(*text));
  }

  selsmt::EncodeOptions encode_options;
  encode_options.distinct_classes_and_permissions = options.distinct;
  selsmt::VerifyReport report = selsmt::run_pipeline(
      *policy, constraints, solver_config(options), encode_options,
      run_solver);

  if (report.input_ok && !options.emit_path.empty()) {
    std::ofstream out(options.emit_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << options.emit_path << "\n";
      return kExitError;
    }
    out << report.script;
  }

  int exit_code;
  if (!run_solver) {
    exit_code = report.input_ok ? kExitSat : kExitError;
    if (report.input_ok && options.emit_path.empty()) {
      std::cout << report.script;
      return exit_code;
    }
  } else {
    exit_code = report_exit_code(report);
  }

  if (options.format == "json") {
    print_json(subcommand, report, exit_code);
  } else if (run_solver || exit_code == kExitError) {
    print_human(report, exit_code);
  }
  return exit_code;
}

int run_bench(const CommonOptions& options, const std::string& ns_spec,
              const std::string& csv_path,
              const std::optional<std::string>& artifacts_dir, int repeat,
              bool parallel) {
  std::vector<int> ns;
  std::stringstream parts(ns_spec);
  std::string part;
  while (std::getline(parts, part, ',')) {
    try {
      ns.push_back(std::stoi(part));
    } catch (const std::exception&) {
      std::cerr << "invalid benchmark size '" << part << "'\n";
      return kExitError;
    }
  }
  selsmt::SweepOptions sweep;
  sweep.repeat = repeat;
  sweep.parallel = parallel;
  sweep.artifacts_dir = artifacts_dir;
  std::vector<selsmt::BenchmarkRecord> records;
  try {
    records = selsmt::run_sweep(ns, solver_config(options), sweep);
  } catch (const selsmt::PolicyError& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  }
  std::string csv = selsmt::to_csv(records);
  if (csv_path.empty() || csv_path == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << csv_path << "\n";
      return kExitError;
    }
    out << csv;
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "SELinux policy verifier: compiles a policy and an SMT specification "
      "into one script and decides consistency with an SMT solver"};
  app.require_subcommand(1);

  CommonOptions verify_options;
  auto* verify = app.add_subcommand(
      "verify", "Parse, encode, splice constraints and run the solver");
  add_input_flags(*verify, verify_options);
  add_solver_flags(*verify, verify_options);
  verify->add_option("--format", verify_options.format,
                     "Output format: human or json")
      ->check(CLI::IsMember({"human", "json"}));

  CommonOptions emit_options;
  auto* emit = app.add_subcommand(
      "emit-smt",
      "Write the generated SMT-LIB2 script (stdout unless --emit-smt)");
  add_input_flags(*emit, emit_options);
  emit->add_option("--format", emit_options.format,
                   "Output format: human or json")
      ->check(CLI::IsMember({"human", "json"}));

  CommonOptions bench_options;
  std::string ns_spec = "2";
  std::string csv_path;
  std::string artifacts_dir;
  int repeat = 1;
  bool parallel = false;
  auto* bench = app.add_subcommand(
      "bench", "Generate synthetic policies and run a timed sweep");
  bench->add_option("--ns", ns_spec,
                    "Comma-separated benchmark sizes, e.g. 2,8,32");
  bench->add_option("--csv", csv_path, "Write the CSV here ('-' for stdout)");
  bench->add_option("--keep-artifacts", artifacts_dir,
                    "Keep generated policy/constraint files in this "
                    "directory");
  bench->add_option("--repeat", repeat,
                    "Repetitions per size; minima are reported")
      ->check(CLI::PositiveNumber);
  bench->add_flag("--parallel", parallel,
                  "Run sweep rows concurrently, one solver process each");
  add_solver_flags(*bench, bench_options);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return run_verify_like(verify_options, /*run_solver=*/true, "verify");
    }
    if (emit->parsed()) {
      return run_verify_like(emit_options, /*run_solver=*/false, "emit-smt");
    }
    if (bench->parsed()) {
      return run_bench(bench_options, ns_spec, csv_path,
                       artifacts_dir.empty()
                           ? std::nullopt
                           : std::optional<std::string>(artifacts_dir),
                       repeat, parallel);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
