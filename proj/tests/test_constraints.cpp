#include <string>

#include "doctest.h"
#include "selsmt/constraint_loader.hpp"
#include "selsmt/parser.hpp"
#include "support/test_env.hpp"

using namespace selsmt;
namespace st = selsmt::testing;

namespace {

SymbolMapping case_study_mapping() {
  auto parsed = parse_policy(
      st::read_file(st::fixtures_dir() + "/android11_system_app.te"));
  REQUIRE(parsed.ok());
  return SymbolMapping::build(parsed.db);
}

}  // namespace

TEST_CASE("case-study constraint fragment loads cleanly") {
  auto mapping = case_study_mapping();
  auto text = st::read_file(st::fixtures_dir() + "/android11_constraint.smt2");
  auto result = load_constraints(text, mapping);
  REQUIRE_MESSAGE(result.ok(), format_error(result.errors.at(0)));
  CHECK(result.fragment.declarations.size() == 1);
  CHECK(result.fragment.assertions.size() == 4);
  CHECK(result.fragment.referenced_symbols.contains("installd_t"));
  CHECK(result.fragment.referenced_symbols.contains("av-allow"));
}

TEST_CASE("unknown symbols are rejected with location") {
  auto mapping = case_study_mapping();
  auto result =
      load_constraints("(assert (av-allow nonexistent_t apk_data_file_t "
                       "file write))",
                       mapping);
  REQUIRE(result.errors.size() == 1);
  CHECK(result.errors[0].kind == ConstraintErrorKind::UnknownSymbol);
  CHECK(result.errors[0].line == 1);
  CHECK(result.errors[0].message.find("nonexistent_t") != std::string::npos);
}

TEST_CASE("only declare-const and assert are admitted") {
  auto mapping = case_study_mapping();
  for (const char* cmd :
       {"(check-sat)", "(exit)", "(set-option :produce-models true)",
        "(define-fun f () Bool true)", "(declare-fun g (Type) Bool)"}) {
    auto result = load_constraints(cmd, mapping);
    REQUIRE_MESSAGE(!result.ok(), cmd);
    CHECK(result.errors[0].kind == ConstraintErrorKind::ForbiddenCommand);
  }
}

TEST_CASE("malformed s-expressions are located") {
  auto mapping = case_study_mapping();
  for (const char* text : {"(assert", "(assert (not true)))", "("}) {
    auto result = load_constraints(text, mapping);
    REQUIRE_MESSAGE(!result.ok(), text);
    CHECK(result.errors[0].kind ==
          ConstraintErrorKind::MalformedSExpression);
    CHECK(result.errors[0].line >= 1);
    CHECK(result.errors[0].column >= 1);
  }
}

TEST_CASE("local declarations and binders extend the vocabulary") {
  auto mapping = case_study_mapping();
  auto result = load_constraints(
      "(assert (forall ((t Type)) (=> (type-has-attribute t probe) "
      "(not (av-allow t apk_data_file_t file write)))))\n"
      "(declare-const probe Type)\n",
      mapping);
  REQUIRE_MESSAGE(result.ok(), format_error(result.errors.at(0)));
  // Declarations are hoisted ahead of the assertions regardless of order.
  auto commands = result.fragment.commands();
  REQUIRE(commands.size() == 2);
  CHECK(commands[0] == "(declare-const probe Type)");
  CHECK(commands[1].starts_with("(assert (forall"));
}

TEST_CASE("let bindings and annotations are understood") {
  auto mapping = case_study_mapping();
  auto result = load_constraints(
      "(assert (let ((x installd_t)) (type-has-attribute x (! installd_t "
      ":named n0))))",
      mapping);
  // The annotation name and let binder are local, not policy symbols.
  CHECK(result.ok());
}

TEST_CASE("declarations must use known sorts") {
  auto mapping = case_study_mapping();
  CHECK(load_constraints("(declare-const k Int)", mapping).ok());
  CHECK(load_constraints("(declare-const k Bool)", mapping).ok());
  CHECK_FALSE(load_constraints("(declare-const k Widget)", mapping).ok());
}

TEST_CASE("load -> render -> load is a fixpoint") {
  auto mapping = case_study_mapping();
  auto text = st::read_file(st::fixtures_dir() + "/android11_constraint.smt2");
  auto first = load_constraints(text, mapping);
  REQUIRE(first.ok());
  std::string rendered = first.fragment.render();
  auto second = load_constraints(rendered, mapping);
  REQUIRE_MESSAGE(second.ok(), format_error(second.errors.at(0)));
  CHECK(second.fragment.render() == rendered);
  CHECK(second.fragment.declarations == first.fragment.declarations);
  CHECK(second.fragment.assertions == first.fragment.assertions);
}

TEST_CASE("multiple errors are collected in one pass") {
  auto mapping = case_study_mapping();
  auto result = load_constraints(
      "(assert (av-allow ghost_a apk_data_file_t file write))\n"
      "(check-sat)\n"
      "(assert (av-allow ghost_b apk_data_file_t file write))\n",
      mapping);
  CHECK(result.errors.size() == 3);
}
