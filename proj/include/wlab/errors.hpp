#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

/// Invalid input or violated precondition. The CLI maps this to exit code 2.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was well posed but failed numerically (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularDenominatorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketFailureError : public NumericalError {
 public:
  BracketFailureError(const std::string& what, double lo, double hi)
      : NumericalError(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

class AxisSingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepCollapseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace wlab
