#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chromalign {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A file was readable but its contents violate the declared format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Precondition on an argument does not hold.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of a mathematical function (e.g. an sRGB channel > 255).
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Cross-record consistency failure (duplicate ids, unknown prompt ids, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Embedding ids that have no matching color pair.
class JoinError : public ValidationError {
 public:
  JoinError(std::string message, std::vector<std::string> missing)
      : ValidationError(std::move(message)), missing_ids_(std::move(missing)) {}

  const std::vector<std::string>& missing_ids() const noexcept { return missing_ids_; }

 private:
  std::vector<std::string> missing_ids_;
};

/// Numerical solver failed; carries the iteration at which it gave up.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, std::size_t iterations)
      : Error(message), iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

}  // namespace chromalign
