#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgbench {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input. Carries the 1-based line number when the input is
// line-oriented (0 otherwise) and the offending text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0,
             std::string text = {})
      : Error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line),
        text_(std::move(text)) {}

  std::size_t line() const { return line_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t line_;
  std::string text_;
};

// Input that parses but violates a domain invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// Durable storage could not be written. The operation may be retried.
class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgbench
