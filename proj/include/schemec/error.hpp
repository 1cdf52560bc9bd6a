#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace schemec {

// Base of every error raised by the kernel.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed concrete syntax. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column, const std::string& file = "")
      : Error((file.empty() ? "" : file + ":") + std::to_string(line) + ":" + std::to_string(column) +
              ": " + what),
        message_(what),
        line_(line),
        column_(column) {}

  const std::string& message() const { return message_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// Ill-sorted term or proposition, unknown symbol, arity mismatch.
class SortError : public Error {
 public:
  using Error::Error;
};

// Rewrite rule or theory declaration rejected at load time.
class TheoryError : public Error {
 public:
  using Error::Error;
};

// A step budget ran out. Distinct from a negative answer.
class FuelExhausted : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its documented domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class TypingError : public Error {
 public:
  using Error::Error;
};

// Witness extraction could not complete.
class WitnessError : public Error {
 public:
  using Error::Error;
};

}  // namespace schemec
