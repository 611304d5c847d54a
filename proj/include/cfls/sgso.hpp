#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"

namespace cfls {

inline constexpr double default_pivot_floor = 1e-12;

/// Orthogonal, non-normalized basis of the columns of X.
///
/// q.col(i) is x_i with its components along q_0..q_{i-1} removed; d[i] is
/// its squared norm. No square roots are taken anywhere. The scaled (dual)
/// basis q_i / d[i] is produced on demand by scaled_basis().
struct SgsoBasis {
  DenseMatrix q;
  DenseVector d;
  double pivot_floor = default_pivot_floor;

  std::size_t size() const noexcept { return q.cols(); }
};

namespace detail {

// Removes from v its components along q.col(0..count-1), one projection at a
// time: each coefficient is taken against the already-reduced v.
inline void orthogonalize(std::span<double> v, const DenseMatrix& q, std::span<const double> d,
                          std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const double c = dot(q.col(j), v) / d[j];
    axpy_sub(v, c, q.col(j));
  }
}

inline void check_pivot(double pivot, double running_max, double floor, std::size_t column) {
  if (!(pivot > floor * std::max(running_max, 1.0))) throw RankDeficient(column);
}

}  // namespace detail

/// Simplified Gram-Schmidt without normalization, modified update order.
/// Throws RankDeficient(i) when d[i] <= pivot_floor * max(d[0..i-1], 1).
inline SgsoBasis sgso(const DenseMatrix& x, double pivot_floor = default_pivot_floor) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (p == 0 || n < p)
    throw DimensionError("sgso: need rows >= cols >= 1, got " + std::to_string(n) + "x" +
                         std::to_string(p));
  if (!(pivot_floor >= 0.0)) throw DimensionError("sgso: pivot floor must be >= 0");

  SgsoBasis b{DenseMatrix(n, p), DenseVector(p), pivot_floor};
  double running_max = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    auto qi = b.q.col(i);
    std::copy(x.col(i).begin(), x.col(i).end(), qi.begin());
    detail::orthogonalize(qi, b.q, b.d, i);
    b.d[i] = dot(qi, qi);
    detail::check_pivot(b.d[i], running_max, pivot_floor, i);
    running_max = std::max(running_max, b.d[i]);
  }
  return b;
}

/// Residual of v after removing its components along every basis column,
/// with the same arithmetic sgso() applies to a trailing column.
inline DenseVector residual_against(const SgsoBasis& b, std::span<const double> v) {
  if (v.size() != b.q.rows()) throw DimensionError("residual_against: length mismatch");
  DenseVector r(v);
  detail::orthogonalize(r.span(), b.q, b.d, b.size());
  return r;
}

/// Q°: column i is q_i / d[i].
inline DenseMatrix scaled_basis(const SgsoBasis& b) {
  DenseMatrix out = b.q;
  for (std::size_t i = 0; i < out.cols(); ++i)
    for (double& v : out.col(i)) v /= b.d[i];
  return out;
}

}  // namespace cfls
