#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfls {

// All library failures derive from Error. Indices carried by exceptions are
// 0-based; messages print them 1-based.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch, bad index, or malformed input.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DimensionError {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : DimensionError("parse error at row " + std::to_string(row) + ", column " +
                       std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  // 1-based, counted in the physical file (header included).
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class InsufficientRows : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

class InsufficientSamples : public DimensionError {
 public:
  using DimensionError::DimensionError;
};

// A pivot fell below the relative floor: the Gram matrix is (numerically)
// singular at this column.
class RankDeficient : public Error {
 public:
  explicit RankDeficient(std::size_t column)
      : Error("rank deficient at column " + std::to_string(column + 1) +
              ": linearly dependent on the preceding columns"),
        column_(column) {}

  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class NotSymmetric : public Error {
 public:
  using Error::Error;
};

}  // namespace cfls
