#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfls/errors.hpp"

namespace cfls {

/// Real dense vector. Converts implicitly to a read-only span so every
/// kernel can take either a vector or a matrix column.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  DenseVector(std::initializer_list<double> values) : data_(values) {}
  explicit DenseVector(std::vector<double> values) : data_(std::move(values)) {}
  explicit DenseVector(std::span<const double> values) : data_(values.begin(), values.end()) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  operator std::span<const double>() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> data_;
};

/// Column-major dense matrix. Columns are contiguous because the
/// orthogonalization kernels walk X one column at a time.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Row-wise literal, e.g. {{1, 1}, {1, 2}, {1, 3}} is 3x2.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.assign(rows_ * cols_, 0.0);
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("ragged matrix literal");
      std::size_t c = 0;
      for (double v : row) (*this)(r, c++) = v;
      ++r;
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t k = 0; k < n; ++k) m(k, k) = 1.0;
    return m;
  }

  static DenseMatrix diagonal(std::span<const double> d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t k = 0; k < d.size(); ++k) m(k, k) = d[k];
    return m;
  }

  static DenseMatrix from_columns(std::span<const DenseVector> columns) {
    if (columns.empty()) return {};
    const std::size_t n = columns.front().size();
    DenseMatrix m(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != n) throw DimensionError("columns differ in length");
      std::copy(columns[j].begin(), columns[j].end(), m.col(j).begin());
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  DenseVector column(std::size_t j) const { return DenseVector(col(j)); }

  DenseVector row(std::size_t r) const {
    DenseVector out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (std::size_t r = 0; r < rows_; ++r) t(c, r) = (*this)(r, c);
    return t;
  }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Inner product, accumulated index-ascending in long double.
inline double dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw DimensionError("dot: length mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
  long double acc = 0.0L;
  for (std::size_t k = 0; k < u.size(); ++k) acc += static_cast<long double>(u[k]) * v[k];
  return static_cast<double>(acc);
}

/// v <- v - alpha * u
inline void axpy_sub(std::span<double> v, double alpha, std::span<const double> u) {
  for (std::size_t k = 0; k < v.size(); ++k) v[k] -= alpha * u[k];
}

/// Gram matrix X^T X. Upper triangle computed, lower mirrored.
inline DenseMatrix gram(const DenseMatrix& x) {
  const std::size_t p = x.cols();
  DenseMatrix g(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      g(i, j) = dot(x.col(i), x.col(j));
      g(j, i) = g(i, j);
    }
  return g;
}

/// [X^T X | X^T y], p x (p + 1).
inline DenseMatrix augmented_gram(const DenseMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows())
    throw DimensionError("augmented_gram: response length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(x.rows()) + " rows");
  const std::size_t p = x.cols();
  const DenseMatrix g = gram(x);
  DenseMatrix out(p, p + 1);
  for (std::size_t j = 0; j < p; ++j)
    std::copy(g.col(j).begin(), g.col(j).end(), out.col(j).begin());
  for (std::size_t i = 0; i < p; ++i) out(i, p) = dot(x.col(i), y);
  return out;
}

/// (1 | X)
inline DenseMatrix prepend_ones(const DenseMatrix& x) {
  if (x.empty()) throw DimensionError("prepend_ones: empty matrix");
  DenseMatrix out(x.rows(), x.cols() + 1);
  std::fill(out.col(0).begin(), out.col(0).end(), 1.0);
  for (std::size_t j = 0; j < x.cols(); ++j)
    std::copy(x.col(j).begin(), x.col(j).end(), out.col(j + 1).begin());
  return out;
}

/// Horizontal concatenation (X | y).
inline DenseMatrix append_column(const DenseMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows()) throw DimensionError("append_column: length mismatch");
  DenseMatrix out(x.rows(), x.cols() + 1);
  std::copy(x.data().begin(), x.data().end(), out.col(0).begin());
  std::copy(y.begin(), y.end(), out.col(x.cols()).begin());
  return out;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      auto oc = out.col(j);
      auto ac = a.col(k);
      for (std::size_t r = 0; r < a.rows(); ++r) oc[r] += ac[r] * bkj;
    }
  return out;
}

inline DenseVector multiply(const DenseMatrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw DimensionError("multiply: vector length mismatch");
  DenseVector out(a.rows());
  for (std::size_t k = 0; k < a.cols(); ++k) {
    if (v[k] == 0.0) continue;
    auto ac = a.col(k);
    for (std::size_t r = 0; r < a.rows(); ++r) out[r] += ac[r] * v[k];
  }
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs(const DenseMatrix& a) { return max_abs(a.data()); }

/// Throws DimensionError naming the first non-finite entry (1-based).
inline void require_finite(const DenseMatrix& a, const std::string& what) {
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (std::size_t r = 0; r < a.rows(); ++r)
      if (!std::isfinite(a(r, c)))
        throw DimensionError(what + ": non-finite value at row " + std::to_string(r + 1) +
                             ", column " + std::to_string(c + 1));
}

}  // namespace cfls
