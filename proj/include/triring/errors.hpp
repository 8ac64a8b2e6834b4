#pragma once

#include <stdexcept>
#include <string>

namespace triring {

// Invalid physical or numerical parameter (non-positive capacitance, bad cutoff, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix conditioning failure (near-singular capacitance matrix, singular solve).
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigensolver failed to converge within its iteration budget.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Charge basis too small for the requested computation.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pointwise evaluation failure (exact scattering pole, degenerate statistics row).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config/schema violation; `pointer` is a JSON-pointer-style path to the offending key.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : std::runtime_error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Filesystem failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace triring
