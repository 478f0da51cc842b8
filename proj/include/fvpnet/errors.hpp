#pragma once

#include <stdexcept>
#include <string>

namespace fvpnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A computation produced NaN or infinity.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A weight model that cannot produce a doubly stochastic matrix on the
/// given graph (negative diagonal entry).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fvpnet
