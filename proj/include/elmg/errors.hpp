#pragma once

#include <stdexcept>
#include <string>

namespace elmg {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: shapes, ranges, malformed files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A linear system that cannot be solved without regularization.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The dense Kronecker system would exceed the configured size cap.
class SizeError : public InputError {
 public:
  using InputError::InputError;
};

/// Too many failed trials in an experiment cell.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

}  // namespace detail
}  // namespace elmg
