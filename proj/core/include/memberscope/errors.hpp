#pragma once

#include <stdexcept>
#include <string>

namespace memberscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// An operator that was required to be positive semidefinite has an
/// eigenvalue below the clamping window.
class NotPositive : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The POVM cannot conclusively separate the requested partition.
class UnsolvablePovm : public Error {
 public:
  using Error::Error;
};

/// Measurement data does not fit the POVM it is analysed against.
class MalformedRecord : public Error {
 public:
  using Error::Error;
};

/// A file on disk violates its schema. `where` names the field or line.
class SchemaError : public Error {
 public:
  SchemaError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace memberscope
