#pragma once

#include <stdexcept>
#include <string>

namespace abep {

// Base of every error raised by the library; callers that only care about
// "the toolkit refused" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input lies outside the domain of a map (e.g. z not in g(Omega)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Site index outside the admissible range.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Parameter combination the operation is not defined for.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// An SDE trajectory left the region where the step size is meaningful.
class NumericalBlowup : public Error {
 public:
  using Error::Error;
};

// A jump-process simulation exceeded its event budget.
class SimulationCap : public Error {
 public:
  using Error::Error;
};

// The absorption linear system could not be solved.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// Rejection sampler acceptance fell below the usable threshold.
class RejectionStall : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, with the offending line/field in the message.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace abep
