#pragma once

#include <stdexcept>
#include <string>

namespace frontlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad coefficient specs, out-of-range parameters, schema violations.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or hit a resource cap.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, std::string diagnostics = {})
      : Error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// A mathematical hypothesis required by an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The caller broke an interface contract (e.g. non-positive test vector).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. log of a non-positive density).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A proven invariant was observed to fail during a computation.
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

}  // namespace frontlab
