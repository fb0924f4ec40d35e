#pragma once

#include <stdexcept>
#include <string>

namespace mgems {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON or CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant. `field()` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A profile or schedule does not have the length the time grid requires.
class LengthMismatchError : public Error {
 public:
  LengthMismatchError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected " + std::to_string(expected) + " rows, got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Artifact written by an incompatible tool version or for another scenario.
class ArtifactMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgems
