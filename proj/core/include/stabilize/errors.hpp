#pragma once

#include <stdexcept>
#include <string>

namespace stabilize {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An element that must be invertible is (numerically) singular.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// A search over a finite tower found no admissible stage.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// A certified computation could not reach its tolerance within budget.
class CertificateError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabilize
