#ifndef PINTLFA_ERRORS_HPP
#define PINTLFA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pintlfa {

/// Base of all library failures. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// input-contract violations
class DimensionError : public Error { using Error::Error; };
class RangeError : public Error { using Error::Error; };
class ParityError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class ConfigurationError : public Error { using Error::Error; };
class CapabilityError : public Error { using Error::Error; };
class BasisError : public Error { using Error::Error; };

// numerical failures
class NumericError : public Error { using Error::Error; };
class FactorizationError : public NumericError { using NumericError::NumericError; };
class DegeneracyError : public NumericError { using NumericError::NumericError; };
class ConsistencyError : public NumericError { using NumericError::NumericError; };

class ConvergenceError : public NumericError {
public:
  ConvergenceError(const std::string& what, double residual)
      : NumericError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

} // namespace pintlfa

#endif
