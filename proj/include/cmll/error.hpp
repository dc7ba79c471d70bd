#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cmll {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad dimensions, out-of-range parameters).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An object was used before it was fully configured (e.g. unresolved kernel bandwidth).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: factorization failure, non-convergence, singular system.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::optional<std::size_t> pivot = std::nullopt)
      : Error(what), pivot_(pivot) {}

  /// Index of the failing pivot for factorization errors.
  std::optional<std::size_t> pivot() const noexcept { return pivot_; }

 private:
  std::optional<std::size_t> pivot_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DeserializeError : public Error {
 public:
  using Error::Error;
};

class VersionError : public DeserializeError {
 public:
  using DeserializeError::DeserializeError;
};

/// A metric has no defined value on the given input (e.g. no relevant labels anywhere).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

}  // namespace cmll
