#include <filesystem>
#include <string>

#include "doctest.h"
#include "selsmt/benchmark.hpp"
#include "selsmt/parser.hpp"
#include "support/test_env.hpp"

using namespace selsmt;
namespace st = selsmt::testing;

TEST_CASE("generate(2) reproduces the reference fixture byte for byte") {
  auto bench = generate({2});
  CHECK(bench.policy == st::read_file(st::fixtures_dir() + "/bench_n2.te"));
}

TEST_CASE("generated policies have the documented element counts") {
  for (int n : {1, 3, 17, 64}) {
    auto bench = generate({n});
    auto parsed = parse_policy(bench.policy);
    REQUIRE_MESSAGE(parsed.ok(), format_error(parsed.errors.at(0)));
    const PolicyDb& db = parsed.db;
    CHECK(db.count(ElementKind::Class) == static_cast<std::size_t>(n));
    CHECK(db.count(ElementKind::Permission) ==
          static_cast<std::size_t>(3 * n));
    CHECK(db.count(ElementKind::User) == static_cast<std::size_t>(n));
    CHECK(db.count(ElementKind::Role) == static_cast<std::size_t>(n + 1));
    CHECK(db.count(ElementKind::TypeLabel) == static_cast<std::size_t>(2 * n));
    CHECK(db.av_rules().size() == static_cast<std::size_t>(n));
    CHECK(db.initial_sids().size() == 2);
  }
}

TEST_CASE("generated policy size grows monotonically") {
  std::size_t previous = 0;
  for (int n : {1, 2, 4, 8, 16}) {
    auto bench = generate({n});
    CHECK(bench.policy.size() > previous);
    previous = bench.policy.size();
  }
}

TEST_CASE("invalid benchmark parameters are rejected") {
  CHECK_THROWS_AS(generate({0}), PolicyError);
  CHECK_THROWS_AS(generate({-5}), PolicyError);
  CHECK_THROWS_AS(run_sweep({}, st::solver_config()), PolicyError);
  int bad[] = {2, 0};
  CHECK_THROWS_AS(run_sweep(bad, st::solver_config()), PolicyError);
}

TEST_CASE("a small sweep verifies satisfiable and fills the record") {
  int ns[] = {2};
  auto records = run_sweep(ns, st::solver_config());
  REQUIRE(records.size() == 1);
  CHECK(records[0].n == 2);
  CHECK(records[0].verdict == Verdict::Sat);
  CHECK(records[0].parse_seconds >= 0);
  CHECK(records[0].solve_seconds > 0);
}

TEST_CASE("sweep records Unknown when the solver is unusable") {
  SolverConfig broken;
  broken.executable = "/nonexistent/smt-solver";
  int ns[] = {1};
  auto records = run_sweep(ns, broken);
  REQUIRE(records.size() == 1);
  CHECK(records[0].verdict == Verdict::Unknown);
}

TEST_CASE("artifacts directory receives the generated inputs") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "selsmt_bench_artifacts";
  fs::remove_all(dir);
  SweepOptions options;
  options.artifacts_dir = dir.string();
  int ns[] = {2};
  auto records = run_sweep(ns, st::solver_config(), options);
  CHECK(records.size() == 1);
  CHECK(fs::exists(dir / "bench_2.te"));
  CHECK(fs::exists(dir / "bench_2_constraint.smt2"));
  CHECK(st::read_file((dir / "bench_2.te").string()) == generate({2}).policy);
  fs::remove_all(dir);
}

TEST_CASE("csv rendering uses the fixed header") {
  std::vector<BenchmarkRecord> records{{2, 0.25, 0.5, 1.5, Verdict::Sat}};
  std::string csv = to_csv(records);
  CHECK(csv.starts_with("n,parse_s,encode_s,solve_s,verdict\n"));
  CHECK(csv.find("2,0.25,0.5,1.5,sat\n") != std::string::npos);
  CHECK(to_csv({}) == "n,parse_s,encode_s,solve_s,verdict\n");
}
