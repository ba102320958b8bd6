#pragma once

#include <stdexcept>
#include <string>

namespace rankrelax {

// Base for every error the library throws. `code()` is a stable, machine
// readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* code() const noexcept { return "error"; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "shape"; }
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "non_finite"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "domain"; }
};

class TapeError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "tape"; }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] const char* code() const noexcept override { return "parse"; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "io"; }
};

class TrainingError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] const char* code() const noexcept override { return "training"; }
};

}  // namespace rankrelax
