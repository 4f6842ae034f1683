#pragma once

#include <stdexcept>
#include <string>

namespace otlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The transport problem has no feasible plan (not enough supply).
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A numerical solver did not reach a certified answer.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// A kernel discretization produced an invalid spectrum.
class DiscretizationFailure : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace otlab
