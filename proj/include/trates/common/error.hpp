#pragma once

#include <stdexcept>
#include <string>

namespace trates {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that violates a declared contract (bad file, out-of-range score, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Text produced by a model (or a file) could not be parsed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace trates
