#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace convabuse {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (corpus lines, CSV, bundles).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Inputs that are well-formed but unusable (empty class, duplicate id, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A model could not be fitted on the given data.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters, missing files, unfitted models.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Feature manifests or bundle schemas do not match.
class VersionError : public Error {
 public:
  using Error::Error;
};

}  // namespace convabuse
