#pragma once

#include <stdexcept>
#include <string>

namespace fbst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad hyperparameters, dimension mismatch, unknown names,
/// inapplicable reparameterizations, schema violations.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The optimization step could not produce a usable supremum.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Posterior sampling or integration failed.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbst
