#pragma once

#include <stdexcept>
#include <string>

namespace sdt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments that violate an operation's precondition (dimension mismatch,
/// out-of-range attribute, empty dataset, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed text in one of the line-oriented formats (decisions, trees,
/// rules, configs).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Failure while reading or writing a scene or dataset file.
class DataError : public Error {
 public:
  enum class Kind { Io, MalformedHeader, SizeMismatch, NonFinite, InvalidValue };

  DataError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace sdt
