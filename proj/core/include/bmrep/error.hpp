#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bmrep {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed expression text; offset is the byte position of the failure.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// A numerical operation failed. Carries the module and operation names so
// callers (the CLI in particular) can report a machine-readable location.
class NumericalError : public Error {
 public:
  NumericalError(std::string module, std::string operation, const std::string& message)
      : Error(module + "." + operation + ": " + message),
        module_(std::move(module)),
        operation_(std::move(operation)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  std::string module_;
  std::string operation_;
};

// Expression lies outside the closure the symbolic engine can handle.
class ClosureError : public Error {
 public:
  using Error::Error;
};

}  // namespace bmrep
