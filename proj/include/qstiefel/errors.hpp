#pragma once

#include <stdexcept>
#include <string>

namespace qstiefel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was violated (non-Hermitian input, infeasible
/// point, tangent vector presented at the wrong base point, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel ran out of sweeps/iterations.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Numerical rank deficiency detected during QR.
class RankError : public Error {
 public:
  using Error::Error;
};

/// The brute-force eigenvalue oracle could not pair Kramers-doubled values.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Malformed QMAT1 / bundle input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qstiefel
