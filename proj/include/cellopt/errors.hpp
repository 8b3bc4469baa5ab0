#pragma once

#include <stdexcept>
#include <string>

namespace cellopt {

// Error taxonomy used across the library. Precondition violations on user
// input throw std::invalid_argument directly; the types below mark failures
// with a dedicated recovery/exit-code path in the CLI.

struct DegenerateElementError : std::runtime_error {
  explicit DegenerateElementError(const std::string& what)
      : std::runtime_error(what) {}
};

struct MeshIntegrityError : std::runtime_error {
  explicit MeshIntegrityError(const std::string& what)
      : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateTensorError : std::runtime_error {
  explicit DegenerateTensorError(const std::string& what)
      : std::runtime_error(what) {}
};

struct DegenerateDesignError : std::runtime_error {
  explicit DegenerateDesignError(const std::string& what)
      : std::runtime_error(what) {}
};

struct StalenessError : std::runtime_error {
  explicit StalenessError(const std::string& what)
      : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cellopt
