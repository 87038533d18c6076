#pragma once

#include <stdexcept>
#include <string>

namespace twophase {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A user-supplied value violates a documented constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed; carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A numerical method failed to make progress.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace twophase
