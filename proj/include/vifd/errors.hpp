#pragma once

#include <stdexcept>
#include <string>

namespace vifd {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shapes of vectors/matrices that do not agree.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A value violates a documented precondition (non-finite entry, empty box, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// An operator was evaluated outside the feasible set it is defined on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The projection QP has no feasible point.
class InfeasibleSystem : public Error {
public:
  using Error::Error;
};

/// The active-set loop exceeded its pivot budget.
class MaxPivots : public Error {
public:
  using Error::Error;
};

/// The brute-force oracle cannot handle the given constraint system.
class UnsupportedShape : public Error {
public:
  using Error::Error;
};

/// The linesearch did not terminate within its halving budget.
class LinesearchFailure : public Error {
public:
  using Error::Error;
};

class UnknownProblem : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace vifd
