#pragma once

#include <stdexcept>
#include <string>

namespace epimon {

// Malformed or inconsistent input data (CSV rows, configs, too few points).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV parse failure tied to a 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Root bracketing or convergence failure in a numerical routine.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad grid, CFL, empty input).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace epimon
