#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "selsmt/solver_driver.hpp"

namespace selsmt::testing {

#ifndef SELSMT_SOURCE_DIR
#error "SELSMT_SOURCE_DIR must be defined by the build"
#endif

inline std::string source_dir() { return SELSMT_SOURCE_DIR; }

inline std::string fixtures_dir() { return source_dir() + "/tests/fixtures"; }

// $SELSMT_SOLVER when set, else the bundled wasm-backed wrapper.
inline std::string solver_path() {
  if (const char* env = std::getenv("SELSMT_SOLVER"); env && *env) {
    return env;
  }
  return source_dir() + "/tools/z3wasm/z3wasm";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline SolverConfig solver_config(int timeout_seconds = 120) {
  SolverConfig config;
  config.executable = solver_path();
  config.timeout = std::chrono::seconds(timeout_seconds);
  return config;
}

}  // namespace selsmt::testing
