#pragma once

#include <string>
#include <vector>

#include "selsmt/constraint_loader.hpp"
#include "selsmt/parser.hpp"
#include "selsmt/smt_encoder.hpp"
#include "selsmt/solver_driver.hpp"

namespace selsmt {

/// One verification run: parse -> encode -> splice constraints -> solve.
struct VerifyReport {
  bool input_ok = false;  // parse and constraint loading succeeded
  std::vector<ParseError> parse_errors;
  std::vector<std::string> warnings;
  std::vector<ConstraintError> constraint_errors;
  std::string script;  // rendered script, when input_ok

  bool solver_ran = false;
  Verdict verdict = Verdict::Unknown;
  std::string unknown_reason;
  std::string solver_error;  // non-empty when the solver could not run

  double parse_seconds = 0;
  double encode_seconds = 0;
  double solve_seconds = 0;
};

/// Builds the script (and optionally runs the solver) for a policy plus an
/// ordered list of constraint fragments.
VerifyReport run_pipeline(std::string_view policy_text,
                          const std::vector<std::string>& constraint_texts,
                          const SolverConfig& solver,
                          const EncodeOptions& options = {},
                          bool run_solver = true);

}  // namespace selsmt
