#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "selsmt/parser.hpp"
#include "selsmt/smt_encoder.hpp"
#include "support/oracle.hpp"
#include "support/random_policy.hpp"
#include "support/test_env.hpp"

using namespace selsmt;
namespace st = selsmt::testing;

namespace {

bool contains_line(const std::vector<std::string>& lines,
                   const std::string& line) {
  return std::find(lines.begin(), lines.end(), line) != lines.end();
}

Verdict solve(const SmtScript& script) {
  return check(render(script), st::solver_config()).verdict;
}

}  // namespace

TEST_CASE("prelude is frozen and uses implication-form injectivity") {
  auto prelude = emit_prelude();
  CHECK(contains_line(prelude, "(declare-sort User 0)"));
  CHECK(contains_line(prelude,
                      "(declare-fun av-allow (Type Type Class Permission) "
                      "Bool)"));
  // Injectivity must be the universally-quantified implication; the
  // negated-existential form is unsatisfiable outright.
  bool found = false;
  for (const auto& line : prelude) {
    if (line.find("(= (user-id u1) (user-id u2)) (= u1 u2)") !=
        std::string::npos) {
      found = true;
    }
    CHECK(line.find("exists") == std::string::npos);
  }
  CHECK(found);
  CHECK(emit_prelude() == prelude);  // byte-stable
}

TEST_CASE("symbol mapping applies conventional suffixes") {
  PolicyDb db;
  auto root = db.declare(ElementKind::User, "root");
  auto sys = db.declare(ElementKind::TypeLabel, "system_app");
  auto already = db.declare(ElementKind::TypeLabel, "apk_data_file_t");
  auto admin = db.declare(ElementKind::Role, "admin");
  auto file = db.declare(ElementKind::Class, "file");
  auto read = db.declare_permission(file, "read");
  auto mapping = SymbolMapping::build(db);
  CHECK(mapping.symbol(root) == "root_u");
  CHECK(mapping.symbol(sys) == "system_app_t");
  CHECK(mapping.symbol(already) == "apk_data_file_t");  // suffix kept once
  CHECK(mapping.symbol(admin) == "admin_r");
  CHECK(mapping.symbol(file) == "file");
  CHECK(mapping.symbol(read) == "read");
}

TEST_CASE("symbol collisions are disambiguated with the uid") {
  PolicyDb db;
  db.declare(ElementKind::TypeLabel, "a_t");
  auto clash = db.declare(ElementKind::TypeLabel, "a");
  auto mapping = SymbolMapping::build(db);
  CHECK(mapping.symbol(clash) == "a_t__1");
}

TEST_CASE("reserved SMT words never become symbols") {
  PolicyDb db;
  auto cls = db.declare(ElementKind::Class, "assert");
  auto mapping = SymbolMapping::build(db);
  CHECK(mapping.symbol(cls) != "assert");
}

TEST_CASE("mapping is injective over random policies") {
  std::mt19937 rng(31337);
  for (int i = 0; i < 100; ++i) {
    PolicyDb db = st::random_policy(rng);
    auto mapping = SymbolMapping::build(db);
    std::set<std::string> seen;
    for (auto kind : kAllElementKinds) {
      for (std::uint32_t uid = 0; uid < db.count(kind); ++uid) {
        CHECK(seen.insert(mapping.symbol(kind, uid)).second);
      }
    }
  }
}

TEST_CASE("policy elements are declared with sequential ids") {
  PolicyDb db;
  db.declare(ElementKind::User, "root");
  auto admin = db.declare(ElementKind::Role, "admin");
  auto t = db.declare(ElementKind::TypeLabel, "shell");
  db.declare(ElementKind::AttributeType, "domain");
  db.add_user_role(*db.find(ElementKind::User, "root"), admin);
  db.add_role_type(admin, t);
  auto script = encode_policy(db);
  CHECK(contains_line(script.policy, "(declare-const root_u User)"));
  CHECK(contains_line(script.policy, "(assert (= (user-id root_u) 0))"));
  // object_r is role uid 0; admin follows it.
  CHECK(contains_line(script.policy, "(assert (= (role-id object_r) 0))"));
  CHECK(contains_line(script.policy, "(assert (= (role-id admin_r) 1))"));
  // Attribute ids continue the base-kind sequence (2 types -> no; here 1
  // declared type, so the attribute takes id 1).
  CHECK(contains_line(script.policy, "(assert (= (type-id domain_t) 1))"));
  CHECK(contains_line(script.policy,
                      "(assert (user-has-role root_u admin_r))"));
  CHECK(contains_line(script.policy, "(assert (role-has-type admin_r "
                                     "shell_t))"));
  CHECK(script.finale == std::vector<std::string>{"(check-sat)"});
}

TEST_CASE("encoding is deterministic") {
  std::mt19937 rng(5);
  PolicyDb db = st::random_policy(rng);
  CHECK(render(encode_policy(db)) == render(encode_policy(db)));
}

TEST_CASE("direct neverallow supersedes the matching allow") {
  auto parsed = parse_policy(
      "class file { read write }\n"
      "type a;\ntype b;\n"
      "allow a b : file { read write };\n"
      "neverallow a b : file write;\n");
  REQUIRE(parsed.ok());
  auto script = encode_policy(parsed.db);
  CHECK(contains_line(script.policy, "(assert (av-allow a_t b_t file read))"));
  CHECK(contains_line(script.policy,
                      "; superseded by neverallow: (av-allow a_t b_t file "
                      "write)"));
  CHECK(contains_line(script.policy,
                      "(assert (av-neverallow a_t b_t file write))"));
  CHECK_FALSE(contains_line(script.policy,
                            "(assert (av-allow a_t b_t file write))"));
}

TEST_CASE("attribute-mediated supersession and ground neverallow expansion") {
  auto parsed = parse_policy(
      "class file { write }\n"
      "type a;\ntype b;\ntype c;\n"
      "attribute grp;\n"
      "typeattribute a grp;\n"
      "typeattribute b grp;\n"
      "allow grp c : file write;\n"
      "neverallow a c : file write;\n");
  REQUIRE(parsed.ok());
  auto script = encode_policy(parsed.db);
  // The allow on the attribute reaches member a, which the neverallow
  // covers, so the whole grant is suppressed.
  CHECK(contains_line(script.policy,
                      "; superseded by neverallow: (av-allow grp_t c_t file "
                      "write)"));
  CHECK(contains_line(script.policy,
                      "(assert (av-neverallow a_t c_t file write))"));
  // The encoded script must stay satisfiable.
  CHECK(solve(script) == Verdict::Sat);
}

TEST_CASE("prelude alone is satisfiable") {
  SmtScript script;
  script.prelude = emit_prelude();
  script.finale = {"(check-sat)"};
  CHECK(solve(script) == Verdict::Sat);
}

TEST_CASE("case-study policy encodes to a satisfiable script") {
  auto parsed = parse_policy(
      st::read_file(st::fixtures_dir() + "/android11_system_app.te"));
  REQUIRE(parsed.ok());
  CHECK(solve(encode_policy(parsed.db)) == Verdict::Sat);
}

TEST_CASE("encoded verdicts agree with the brute-force oracle") {
  std::mt19937 rng(404);
  int probes = 0;
  for (int i = 0; i < 12 && probes < 24; ++i) {
    PolicyDb db = st::random_policy(rng);
    if (db.av_rules().empty()) continue;
    st::AccessOracle oracle(db);
    auto mapping = SymbolMapping::build(db);
    auto script = encode_policy(db);

    auto symbol_at = [&](std::uint32_t flat) {
      auto n_types =
          static_cast<std::uint32_t>(db.count(ElementKind::TypeLabel));
      return flat < n_types
                 ? mapping.symbol(ElementKind::TypeLabel, flat)
                 : mapping.symbol(ElementKind::AttributeType, flat - n_types);
    };
    auto probe = [&](const st::AccessOracle::Tuple& t,
                     bool negated) {
      auto [s, tt, c, p] = t;
      std::string body = "(av-allow " + symbol_at(s) + " " + symbol_at(tt) +
                         " " + mapping.symbol(ElementKind::Class, c) + " " +
                         mapping.symbol(ElementKind::Permission, p) + ")";
      SmtScript probed = script;
      probed.constraints = {
          negated ? "(assert (not " + body + "))" : "(assert " + body + ")"};
      return solve(probed);
    };

    // One granted and one forbidden tuple per policy when available.
    if (!oracle.granted_set().empty()) {
      const auto& t = *oracle.granted_set().begin();
      CHECK(probe(t, true) == Verdict::Unsat);
      ++probes;
    }
    if (!oracle.forbidden_set().empty()) {
      const auto& t = *oracle.forbidden_set().begin();
      CHECK(probe(t, false) == Verdict::Unsat);
      CHECK_FALSE(oracle.granted(*oracle.forbidden_set().begin()));
      ++probes;
    }
  }
  CHECK(probes > 0);
}

TEST_CASE("render layout is segmented and LF-terminated") {
  PolicyDb db;
  db.declare(ElementKind::TypeLabel, "t");
  auto script = encode_policy(db);
  std::string text = render(script);
  CHECK(text.find("; === prelude ===") != std::string::npos);
  CHECK(text.find("; === policy ===") != std::string::npos);
  CHECK(text.find("; === finale ===") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
}
