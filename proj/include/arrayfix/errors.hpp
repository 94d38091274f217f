#pragma once

#include <stdexcept>
#include <string>

namespace arrayfix {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// F(0) == 0, so SLL normalization is undefined.
class DegenerateBroadside : public Error {
 public:
  using Error::Error;
};

class NoMainlobe : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

// A correction touched an element that is masked out (failed element).
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// No correction meeting the metric target could be found.
class Infeasible : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace arrayfix
