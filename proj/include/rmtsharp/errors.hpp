#pragma once
// Exception taxonomy. Callers distinguish three failure classes: invalid
// parameters or malformed configuration (usage, CLI exit code 2), I/O
// failures (runtime, exit code 1), and iterative solvers that fail to
// converge (runtime; experiment runners record the value as missing).

#include <stdexcept>
#include <string>

namespace rmtsharp {

struct parameter_error : std::invalid_argument {
  explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rmtsharp
