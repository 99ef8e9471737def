#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spillover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data that cannot be analysed (too few buckets, empty graph, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace spillover
