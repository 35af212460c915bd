#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "selsmt/policy_model.hpp"

namespace selsmt {

/// 1-based position of a token in the input text.
struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 1;

  bool operator==(const SourceSpan&) const = default;
};

enum class ParseErrorKind { Lex, Syntax, Semantic };

struct ParseError {
  SourceSpan span;
  std::string message;
  ParseErrorKind kind = ParseErrorKind::Syntax;
};

enum class TokenType {
  Identifier,
  KwClass,
  KwSid,
  KwRole,
  KwType,
  KwAttribute,
  KwRoleattribute,
  KwTypeattribute,
  KwAllow,
  KwNeverallow,
  KwUser,
  KwRoles,
  KwTypes,
  LBrace,
  RBrace,
  Colon,
  Semicolon,
  End,
};

struct Token {
  TokenType type;
  std::string text;
  SourceSpan span;
};

struct TokenizeResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<ParseError> errors;
};

struct ParseResult {
  PolicyDb db;
  std::vector<ParseError> errors;
  std::vector<std::string> warnings;  // naming-convention advisories

  bool ok() const { return errors.empty(); }
};

/// Splits policy text into identifiers, keywords and punctuation.
/// `#` starts a comment running to end of line. Any byte outside the
/// token alphabet is reported as a Lex error and skipped.
TokenizeResult tokenize(std::string_view input);

/// Parses the policy language into a PolicyDb. Statements may appear in any
/// order; identifier references are resolved in a second pass. Semantic
/// errors do not stop the parse, so one run reports as many independent
/// problems as possible.
ParseResult parse_policy(std::string_view input);

/// Renders a PolicyDb back to policy text. Re-parsing the output yields a
/// structurally identical database.
std::string print_policy(const PolicyDb& db);

std::string format_error(const ParseError& error);

}  // namespace selsmt
