#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"
#include "cfls/sgso.hpp"

namespace cfls {

/// Upper factor U of X^T X (unit-lower L is never stored; it is
/// (U diag(1/u_ii))^T). When built from (X | y), uy holds u_{i,y}.
struct UpperFactor {
  DenseMatrix u;
  std::optional<DenseVector> uy;

  std::size_t size() const noexcept { return u.cols(); }
};

namespace detail {

// Rows 0..pivot_rows-1 of the upper factor of the Gram matrix of `cols`:
//   u_ij = <x_i, x_j> - sum_{k<i} u_ki u_kj / u_kk,  j >= i.
// Entries below the diagonal vanish and are left at zero.
inline DenseMatrix upper_rows(std::span<const std::span<const double>> cols,
                              std::size_t pivot_rows, double pivot_floor) {
  const std::size_t m = cols.size();
  DenseMatrix u(pivot_rows, m);
  double running_max = 0.0;
  for (std::size_t i = 0; i < pivot_rows; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double v = dot(cols[i], cols[j]);
      for (std::size_t k = 0; k < i; ++k) v -= u(k, i) * u(k, j) / u(k, k);
      u(i, j) = v;
    }
    check_pivot(u(i, i), running_max, pivot_floor, i);
    running_max = std::max(running_max, u(i, i));
  }
  return u;
}

inline std::vector<std::span<const double>> column_spans(const DenseMatrix& x) {
  std::vector<std::span<const double>> cols;
  cols.reserve(x.cols() + 1);
  for (std::size_t j = 0; j < x.cols(); ++j) cols.push_back(x.col(j));
  return cols;
}

inline void check_shape(const DenseMatrix& x, double pivot_floor) {
  if (x.cols() == 0 || x.rows() < x.cols())
    throw DimensionError("lu_upper: need rows >= cols >= 1, got " + std::to_string(x.rows()) +
                         "x" + std::to_string(x.cols()));
  if (!(pivot_floor >= 0.0)) throw DimensionError("lu_upper: pivot floor must be >= 0");
}

}  // namespace detail

inline UpperFactor lu_upper(const DenseMatrix& x, double pivot_floor = default_pivot_floor) {
  detail::check_shape(x, pivot_floor);
  const auto cols = detail::column_spans(x);
  return {detail::upper_rows(cols, x.cols(), pivot_floor), std::nullopt};
}

/// Same U as lu_upper(x) plus the column u_{i,y}. The arithmetic is the
/// first p rows of lu_upper on (X | y).
inline UpperFactor lu_upper_augmented(const DenseMatrix& x, std::span<const double> y,
                                      double pivot_floor = default_pivot_floor) {
  detail::check_shape(x, pivot_floor);
  if (y.size() != x.rows())
    throw DimensionError("lu_upper_augmented: response length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(x.rows()) + " rows");
  auto cols = detail::column_spans(x);
  cols.push_back(y);
  const std::size_t p = x.cols();
  DenseMatrix full = detail::upper_rows(cols, p, pivot_floor);

  UpperFactor f{DenseMatrix(p, p), DenseVector(full.col(p))};
  for (std::size_t j = 0; j < p; ++j) std::copy(full.col(j).begin(), full.col(j).end(), f.u.col(j).begin());
  return f;
}

/// C = U / diag(U), with c_{i,y} appended as a last column when present.
inline DenseMatrix scaled_rows(const UpperFactor& f) {
  const std::size_t p = f.size();
  DenseMatrix c(p, p + (f.uy ? 1 : 0));
  for (std::size_t i = 0; i < p; ++i) {
    const double pivot = f.u(i, i);
    for (std::size_t j = i; j < p; ++j) c(i, j) = f.u(i, j) / pivot;
    if (f.uy) c(i, p) = (*f.uy)[i] / pivot;
  }
  return c;
}

}  // namespace cfls
