#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace silref {

// Base class for every error raised by the library. Subclasses name the
// failure so callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class BehindCamera : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what),
        message_(what),
        line_(line) {}
  std::size_t line() const { return line_; }
  // The message without the line prefix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptyMesh : public Error {
 public:
  using Error::Error;
};

class NothingVisible : public Error {
 public:
  using Error::Error;
};

class StaleTape : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyMask : public Error {
 public:
  using Error::Error;
};

class InvalidSize : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// Step-0 gradient norm below the floor: the optimizer starts on a plateau.
class VanishedGradient : public Error {
 public:
  VanishedGradient(const std::string& what, double loss, double grad_norm)
      : Error(what), loss_(loss), grad_norm_(grad_norm) {}
  double loss() const { return loss_; }
  double grad_norm() const { return grad_norm_; }

 private:
  double loss_;
  double grad_norm_;
};

class ZeroReference : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

}  // namespace silref
