#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "selsmt/smt_encoder.hpp"

namespace selsmt {

enum class ConstraintErrorKind {
  MalformedSExpression,
  ForbiddenCommand,
  UnknownSymbol,
};

struct ConstraintError {
  int line = 1;
  int column = 1;
  std::string message;
  ConstraintErrorKind kind = ConstraintErrorKind::MalformedSExpression;
};

/// A validated user-specification fragment: constant declarations plus
/// assertions, normalised to canonical single-line commands. Declarations
/// are hoisted ahead of the assertions regardless of input order.
struct ConstraintFragment {
  std::vector<std::string> declarations;
  std::vector<std::string> assertions;
  std::set<std::string> referenced_symbols;

  std::vector<std::string> commands() const {
    std::vector<std::string> all = declarations;
    all.insert(all.end(), assertions.begin(), assertions.end());
    return all;
  }

  std::string render() const;
};

struct ConstraintLoadResult {
  ConstraintFragment fragment;
  std::vector<ConstraintError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses an SMT-LIB2 fragment and checks it against the policy vocabulary.
/// Only `declare-const` and `assert` commands are admitted; every referenced
/// symbol must come from the fixed prelude vocabulary, the policy's symbol
/// mapping, a fragment-local declaration, or a local binder.
ConstraintLoadResult load_constraints(std::string_view input,
                                      const SymbolMapping& mapping);

std::string format_error(const ConstraintError& error);

}  // namespace selsmt
