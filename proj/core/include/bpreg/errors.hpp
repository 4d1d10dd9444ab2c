#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpreg {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a special function or density.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Data or model specification that violates a structural requirement.
class InvalidData : public Error {
 public:
  using Error::Error;
};

// Expected information not positive definite or too badly conditioned.
class SingularInformation : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// Log-likelihood or score came out non-finite.
class EvaluationFailure : public Error {
 public:
  using Error::Error;
};

// Malformed CSV input. Row is 1-based over data rows (header is row 0),
// column is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class RaggedRows : public ParseError {
 public:
  using ParseError::ParseError;
};

class NonPositiveResponse : public InvalidData {
 public:
  NonPositiveResponse(const std::string& what, std::size_t row)
      : InvalidData(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace bpreg
