#pragma once

#include <stdexcept>
#include <string>

namespace indsum {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller-side precondition not met (sample counts, variance too small, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failures: series did not converge inside the allowed budget, or
// a search left its horizon.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class HorizonError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace indsum
