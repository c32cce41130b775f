#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reprokit {

// Raised when an input stream violates the run/qrels interchange format.
// line() is 1-based; a value of 0 means the error concerns the stream as a
// whole (e.g. empty input).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t line)
      : std::runtime_error(line == 0 ? message
                                     : "line " + std::to_string(line) + ": " + message),
        message_(std::move(message)),
        line_(line) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string message_;
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally valid inputs that cannot be combined: mismatched or disjoint
// topic sets, nothing evaluable, measure-name mismatch.
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request the given mode or inputs cannot serve (e.g. a plot kind that
// needs a replication quadruple).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reprokit
