#pragma once

#include <stdexcept>
#include <string>

namespace snt {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class FieldMismatch : public Error {
 public:
  using Error::Error;
};

class NotAUnit : public Error {
 public:
  using Error::Error;
};

class InvalidModule : public Error {
 public:
  using Error::Error;
};

class NotTStable : public Error {
 public:
  using Error::Error;
};

class NotAMember : public Error {
 public:
  using Error::Error;
};

class HypothesisFailed : public Error {
 public:
  using Error::Error;
};

class IsometryMismatch : public Error {
 public:
  using Error::Error;
};

/// Malformed parameters or input data (bad lattice, point outside the domain, parse errors).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive enumeration would exceed its size guard.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

/// Raised when a series cannot be truncated within the requested tail budget.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace snt
