#pragma once

#include <cstddef>
#include <span>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"
#include "cfls/ols.hpp"
#include "cfls/parallel.hpp"
#include "cfls/sgso.hpp"

namespace cfls {

/// Left generalized inverse (X^T X)^{-1} X^T (or (X^T W X)^{-1} X^T W), one
/// row per column of the source X.
struct PseudoInverse {
  DenseMatrix rows;  // p x n
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;

  DenseVector row(std::size_t i) const { return rows.row(i); }
};

/// Row i (0-based) of X^+:
///   x_i^+ = (q°_i)^T [I - x_{i+1}(q°_{i+1})^T] ... [I - x_p(q°_p)^T],
/// evaluated left to right as r <- r - (r . x_k) q°_k.
inline DenseVector pseudo_row(std::size_t i, const DenseMatrix& x, const SgsoBasis& b) {
  detail::check_basis(x, b);
  detail::check_index(i, b.size(), "pseudo_row");
  DenseVector r(b.q.col(i));
  for (double& v : r) v /= b.d[i];
  for (std::size_t k = i + 1; k < b.size(); ++k) {
    const double c = dot(r, x.col(k)) / b.d[k];
    axpy_sub(r.span(), c, b.q.col(k));
  }
  return r;
}

inline PseudoInverse generalized_inverse(const DenseMatrix& x, const SgsoBasis& b,
                                         unsigned threads = 1) {
  detail::check_basis(x, b);
  const std::size_t p = b.size();
  PseudoInverse out{DenseMatrix(p, x.rows()), x.rows(), p};
  parallel_for(p, threads, [&](std::size_t i) {
    const DenseVector r = pseudo_row(i, x, b);
    for (std::size_t c = 0; c < r.size(); ++c) out.rows(i, c) = r[c];
  });
  return out;
}

inline PseudoInverse generalized_inverse(const DenseMatrix& x,
                                         double pivot_floor = default_pivot_floor,
                                         unsigned threads = 1) {
  return generalized_inverse(x, sgso(x, pivot_floor), threads);
}

/// s^{ij} = x_i^+ . x_j^+
inline double precision_element(std::size_t i, std::size_t j, const PseudoInverse& pinv) {
  const std::size_t p = pinv.rows.rows();
  detail::check_index(i, p, "precision_element");
  detail::check_index(j, p, "precision_element");
  if (i > j) std::swap(i, j);
  return dot(pinv.rows.row(i), pinv.rows.row(j));
}

/// Single precision element straight from X: only rows i and j of X^+ are
/// formed.
inline double precision_element(std::size_t i, std::size_t j, const DenseMatrix& x,
                                double pivot_floor = default_pivot_floor) {
  const SgsoBasis b = sgso(x, pivot_floor);
  detail::check_index(i, b.size(), "precision_element");
  detail::check_index(j, b.size(), "precision_element");
  if (i > j) std::swap(i, j);
  const DenseVector ri = pseudo_row(i, x, b);
  if (i == j) return dot(ri, ri);
  return dot(ri, pseudo_row(j, x, b));
}

/// S = X^+ (X^+)^T; upper triangle computed, lower mirrored.
inline DenseMatrix precision_matrix(const PseudoInverse& pinv) {
  const std::size_t p = pinv.rows.rows();
  const DenseMatrix t = pinv.rows.transpose();  // n x p, rows of X^+ as columns
  DenseMatrix s(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      s(i, j) = dot(t.col(i), t.col(j));
      s(j, i) = s(i, j);
    }
  return s;
}

}  // namespace cfls
