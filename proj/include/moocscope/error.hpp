#pragma once

#include <stdexcept>
#include <string>

namespace moocscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files, malformed persisted artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Correlation of a constant series.
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

}  // namespace moocscope
