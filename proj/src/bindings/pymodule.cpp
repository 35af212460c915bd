#include <pybind11/chrono.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "selsmt/benchmark.hpp"
#include "selsmt/pipeline.hpp"

namespace py = pybind11;

namespace {

selsmt::PolicyDb parse_or_raise(const std::string& text) {
  selsmt::ParseResult result = selsmt::parse_policy(text);
  if (!result.ok()) {
    std::ostringstream msg;
    for (const auto& error : result.errors) {
      msg << selsmt::format_error(error) << "\n";
    }
    throw py::value_error(msg.str());
  }
  return std::move(result.db);
}

selsmt::SolverConfig make_config(const std::optional<std::string>& solver,
                                 double timeout_seconds) {
  selsmt::SolverConfig config;
  config.executable = solver.value_or(selsmt::default_solver());
  config.timeout = std::chrono::milliseconds(
      static_cast<long long>(timeout_seconds * 1000));
  return config;
}

}  // namespace

PYBIND11_MODULE(_selsmt, m) {
  m.doc() = "SELinux RBAC policy verification via SMT";

  py::enum_<selsmt::ElementKind>(m, "ElementKind")
      .value("User", selsmt::ElementKind::User)
      .value("Role", selsmt::ElementKind::Role)
      .value("TypeLabel", selsmt::ElementKind::TypeLabel)
      .value("Class", selsmt::ElementKind::Class)
      .value("Permission", selsmt::ElementKind::Permission)
      .value("AttributeRole", selsmt::ElementKind::AttributeRole)
      .value("AttributeType", selsmt::ElementKind::AttributeType);

  py::class_<selsmt::PolicyDb>(m, "PolicyDb")
      .def("count", &selsmt::PolicyDb::count)
      .def("names", &selsmt::PolicyDb::names)
      .def("__repr__", [](const selsmt::PolicyDb& db) {
        std::ostringstream out;
        out << "<PolicyDb types=" << db.count(selsmt::ElementKind::TypeLabel)
            << " roles=" << db.count(selsmt::ElementKind::Role)
            << " users=" << db.count(selsmt::ElementKind::User)
            << " rules=" << db.av_rules().size() << ">";
        return out.str();
      });

  m.def("parse_policy", &parse_or_raise, py::arg("text"),
        "Parse policy text; raises ValueError with located diagnostics.");

  m.def("prelude", [] {
    std::string text;
    for (const auto& line : selsmt::emit_prelude()) text += line + "\n";
    return text;
  });

  m.def(
      "render_smt",
      [](const std::string& policy,
         const std::vector<std::string>& constraints, bool distinct) {
        selsmt::EncodeOptions options;
        options.distinct_classes_and_permissions = distinct;
        selsmt::VerifyReport report = selsmt::run_pipeline(
            policy, constraints, selsmt::SolverConfig{}, options,
            /*run_solver=*/false);
        if (!report.input_ok) {
          std::ostringstream msg;
          for (const auto& error : report.parse_errors) {
            msg << selsmt::format_error(error) << "\n";
          }
          for (const auto& error : report.constraint_errors) {
            msg << selsmt::format_error(error) << "\n";
          }
          throw py::value_error(msg.str());
        }
        return report.script;
      },
      py::arg("policy"), py::arg("constraints") = std::vector<std::string>{},
      py::arg("distinct") = false,
      "Compile policy text plus constraint fragments into an SMT-LIB2 "
      "script.");

  m.def(
      "verify",
      [](const std::string& policy,
         const std::vector<std::string>& constraints,
         const std::optional<std::string>& solver, double timeout_seconds) {
        selsmt::VerifyReport report = selsmt::run_pipeline(
            policy, constraints, make_config(solver, timeout_seconds));
        py::dict result;
        if (!report.input_ok) {
          std::vector<std::string> errors;
          for (const auto& error : report.parse_errors) {
            errors.push_back(selsmt::format_error(error));
          }
          for (const auto& error : report.constraint_errors) {
            errors.push_back(selsmt::format_error(error));
          }
          result["verdict"] = "error";
          result["errors"] = errors;
          return result;
        }
        result["verdict"] = report.solver_ran
                                ? to_string(report.verdict)
                                : "error";
        if (!report.solver_error.empty()) {
          result["solver_error"] = report.solver_error;
        }
        result["parse_s"] = report.parse_seconds;
        result["encode_s"] = report.encode_seconds;
        result["solve_s"] = report.solve_seconds;
        return result;
      },
      py::arg("policy"), py::arg("constraints") = std::vector<std::string>{},
      py::arg("solver") = std::nullopt, py::arg("timeout_seconds") = 300.0,
      "Run the full parse/encode/solve pipeline; returns a result dict.");

  m.def(
      "generate_benchmark",
      [](int n) {
        selsmt::GeneratedBenchmark bench = selsmt::generate({n});
        return py::make_tuple(bench.policy, bench.constraint);
      },
      py::arg("n"),
      "Generate the synthetic (policy, constraint) pair of size n.");
}
