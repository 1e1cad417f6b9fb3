#pragma once

#include <stdexcept>
#include <string>

namespace hlab {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad run configuration: unknown names, out-of-range parameters,
// invalid solution/suite combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Evaluation point outside a solution's declared domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Elementary-function composition outside its domain (log/sqrt of a
// non-positive constant term, reciprocal of zero).
class DerivativeDomainError : public Error {
 public:
  DerivativeDomainError(const std::string& what, double constant_term)
      : Error(what + " (constant term " + std::to_string(constant_term) + ")"),
        constant_term_(constant_term) {}
  double constant_term() const { return constant_term_; }

 private:
  double constant_term_ = 0.0;
};

// A derivative of higher order than the jet carries was requested.
class OrderExceededError : public Error {
 public:
  using Error::Error;
};

// Mismatched tensor shapes, index ranges or variances.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Metric not invertible at the base point.
class SingularMetricError : public Error {
 public:
  using Error::Error;
};

// Space-time metric of the approximation family not positive-definite
// at the requested point.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlab
