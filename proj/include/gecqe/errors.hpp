#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gecqe {

// Base of every error the toolkit throws on bad input or failed runs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a structural invariant (edit spans, overlaps).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// JSON documents whose content violates the documented schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Numerical failures during optimization (non-finite losses and similar).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace gecqe
