#pragma once

#include <stdexcept>

namespace hypwalk {

// Bad input: violated precondition, invalid parameters, malformed config.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not reach its contract (tolerance, residual).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejection sampler with hopeless acceptance rate.
class SamplerError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline void require(bool ok, const char* what) {
  if (!ok) throw PreconditionError(what);
}

}  // namespace hypwalk
