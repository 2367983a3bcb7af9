#pragma once

#include <stdexcept>
#include <string>

namespace decoyvault {

/// Base class for all decoyvault errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violated a precondition (bad characters, malformed encoding, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Input exceeded a size bound.
class LengthError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

/// A referenced object, record, token or file does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// An id that must be unique already exists.
class DuplicateError : public Error {
 public:
  using Error::Error;
};

/// An operation was rejected by policy (incomplete identity, bad level, ...).
class PolicyError : public Error {
 public:
  using Error::Error;
};

/// An underlying filesystem or OS operation failed. Distinct from NotFoundError.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace decoyvault
