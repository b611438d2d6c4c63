#pragma once

#include <stdexcept>
#include <string>

namespace pcfair {

enum class ErrorKind {
  Parse,
  Input,
  Validation,
  ZeroEvidence,
  DivisionByZero,
  InfeasibleRepair,
  IncompatibleStructure,
  EnumerationCapExceeded,
  IncompleteInput,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the circuit, CSV and schema readers. `line()` is 1-based, 0 when
/// the problem is not tied to a line (e.g. a missing root declaration).
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(ErrorKind::Parse, line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace pcfair
