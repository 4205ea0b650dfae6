#pragma once

#include <stdexcept>
#include <string>

namespace gdeconv {

// Base class for every error raised by the library. The CLI maps these onto
// exit codes: NumericalError -> 3, everything else -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument values (probabilities, orders, sizes).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input files or bundles.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit IngestionError(const std::string& what) : Error(what), line_(0) {}

  // 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Violated preconditions on matrices or decompositions (shape, symmetry).
class ContractError : public Error {
 public:
  using Error::Error;
};

class DegenerateDegreeError : public Error {
 public:
  using Error::Error;
};

// A filter whose frequency response vanishes at some graph frequency.
class SingularFilterError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdeconv
