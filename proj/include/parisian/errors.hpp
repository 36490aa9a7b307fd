#pragma once

#include <stdexcept>
#include <string>

namespace parisian {

/// Base class of every numeric failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: parameters, grids, specs. The CLI maps this to exit code 2.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A draw-down function evaluated where xi(x) >= x.
class DomainViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Evaluation at a pole of psi or of a transform.
class PoleError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// The model does not produce the expected root structure.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

/// Kernel evaluated where W_q of the gap vanishes.
class BoundaryEval : public Error {
 public:
  using Error::Error;
};

class IntegralDivergence : public Error {
 public:
  using Error::Error;
};

/// The tail of an infinite-horizon integral could not be cut below tolerance.
class TruncationFailure : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// More than the allowed share of simulated paths hit the time horizon.
class CensoringExcess : public Error {
 public:
  using Error::Error;
};

}  // namespace parisian
