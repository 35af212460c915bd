#include "selsmt/pipeline.hpp"

#include <chrono>

namespace selsmt {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

VerifyReport run_pipeline(std::string_view policy_text,
                          const std::vector<std::string>& constraint_texts,
                          const SolverConfig& solver,
                          const EncodeOptions& options, bool run_solver) {
  VerifyReport report;

  auto start = std::chrono::steady_clock::now();
  ParseResult parsed = parse_policy(policy_text);
  report.parse_seconds = seconds_since(start);
  report.parse_errors = parsed.errors;
  report.warnings = parsed.warnings;
  if (!parsed.ok()) return report;

  start = std::chrono::steady_clock::now();
  SmtScript script = encode_policy(parsed.db, options);
  SymbolMapping mapping = SymbolMapping::build(parsed.db);
  for (const auto& text : constraint_texts) {
    ConstraintLoadResult loaded = load_constraints(text, mapping);
    if (!loaded.ok()) {
      report.constraint_errors.insert(report.constraint_errors.end(),
                                      loaded.errors.begin(),
                                      loaded.errors.end());
      continue;
    }
    auto commands = loaded.fragment.commands();
    script.constraints.insert(script.constraints.end(), commands.begin(),
                              commands.end());
  }
  report.encode_seconds = seconds_since(start);
  if (!report.constraint_errors.empty()) return report;

  report.input_ok = true;
  report.script = render(script);

  if (!run_solver) return report;
  try {
    VerificationResult result = check(report.script, solver);
    report.solver_ran = true;
    report.verdict = result.verdict;
    report.unknown_reason = result.unknown_reason;
    report.solve_seconds = result.wall_time.count();
  } catch (const SolverError& e) {
    report.solver_error = e.what();
  }
  return report;
}

}  // namespace selsmt
