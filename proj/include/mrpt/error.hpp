#pragma once

#include <stdexcept>
#include <string>

namespace mrpt {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar parameter is outside its admissible range (a, T, k, v, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Requested tree depth cannot be realised without empty leaves.
class DepthError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// A point index refers outside the dataset.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or inconsistent file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An index file was built over a different dataset.
class ChecksumError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrpt
