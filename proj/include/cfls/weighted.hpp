#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "cfls/errors.hpp"
#include "cfls/geninv.hpp"
#include "cfls/matrix.hpp"
#include "cfls/sgso.hpp"

namespace cfls {

/// Weighted SGSO basis: q_i(W) = W x_i - sum_{j<i} (<q_j(W), x_i> / <q_j(W), x_j>) q_j(W).
/// pivots[i] = <q_i(W), x_i>; W may be indefinite, so pivots may be negative.
struct WeightedBasis {
  DenseMatrix qw;
  DenseVector pivots;
  std::size_t n = 0;

  std::size_t size() const noexcept { return qw.cols(); }
};

inline constexpr double weight_symmetry_tol = 1e-10;

inline DenseMatrix diagonal_weights(std::span<const double> w) { return DenseMatrix::diagonal(w); }

/// Throws NotSymmetric when max|W - W^T| > 1e-10 * max(max|W|, 1).
inline void check_symmetric(const DenseMatrix& w) {
  if (w.rows() != w.cols())
    throw DimensionError("weights must be square, got " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()));
  double worst = 0.0;
  std::size_t wr = 0, wc = 0;
  for (std::size_t c = 0; c < w.cols(); ++c)
    for (std::size_t r = c + 1; r < w.rows(); ++r) {
      const double gap = std::abs(w(r, c) - w(c, r));
      if (gap > worst) {
        worst = gap;
        wr = r;
        wc = c;
      }
    }
  if (worst > weight_symmetry_tol * std::max(max_abs(w), 1.0))
    throw NotSymmetric("weight matrix is not symmetric: entries (" + std::to_string(wr + 1) +
                       "," + std::to_string(wc + 1) + ") and (" + std::to_string(wc + 1) + "," +
                       std::to_string(wr + 1) + ") differ by " + std::to_string(worst));
}

namespace detail {

inline void check_weighted_shapes(const DenseMatrix& x, const DenseMatrix& w, double pivot_floor) {
  if (x.cols() == 0 || x.rows() < x.cols())
    throw DimensionError("weighted: need rows >= cols >= 1");
  if (w.rows() != x.rows())
    throw DimensionError("weighted: weights are " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", design has " + std::to_string(x.rows()) +
                         " rows");
  if (!(pivot_floor >= 0.0)) throw DimensionError("weighted: pivot floor must be >= 0");
  check_symmetric(w);
}

inline void check_weighted_pivot(double pivot, double running_max, double floor, std::size_t i) {
  if (!(std::abs(pivot) > floor * std::max(running_max, 1.0))) throw RankDeficient(i);
}

}  // namespace detail

/// Builds Q(W). The x-space directions z_i (with q_i(W) = W z_i) are reduced
/// one projection at a time, mirroring the unweighted sgso() ordering.
inline WeightedBasis weighted_sgso(const DenseMatrix& x, const DenseMatrix& w,
                                   double pivot_floor = default_pivot_floor) {
  detail::check_weighted_shapes(x, w, pivot_floor);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  WeightedBasis b{DenseMatrix(n, p), DenseVector(p), n};
  DenseMatrix z(n, p);
  double running_max = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    auto zi = z.col(i);
    std::copy(x.col(i).begin(), x.col(i).end(), zi.begin());
    for (std::size_t j = 0; j < i; ++j) {
      const double c = dot(b.qw.col(j), zi) / b.pivots[j];
      axpy_sub(zi, c, z.col(j));
    }
    const DenseVector qi = multiply(w, zi);
    std::copy(qi.begin(), qi.end(), b.qw.col(i).begin());
    b.pivots[i] = dot(b.qw.col(i), x.col(i));
    detail::check_weighted_pivot(b.pivots[i], running_max, pivot_floor, i);
    running_max = std::max(running_max, std::abs(b.pivots[i]));
  }
  return b;
}

/// Weighted coefficients with per-index denominators:
///   beta_p = <q_p(W), y> / <q_p(W), x_p>,
///   beta_i = q_i(W)^T / <q_i(W), x_i> * prod_{k>i} [I - x_k q_k(W)^T / <q_k(W), x_k>] y.
inline DenseVector weighted_coeffs(const DenseMatrix& x, const DenseMatrix& w,
                                   std::span<const double> y, const WeightedBasis& b) {
  if (b.qw.rows() != x.rows() || b.qw.cols() != x.cols() || w.rows() != x.rows())
    throw DimensionError("weighted_coeffs: basis, weights and design disagree in shape");
  if (y.size() != x.rows()) throw DimensionError("weighted_coeffs: response length mismatch");
  const std::size_t p = b.size();
  DenseVector beta(p);
  DenseVector z(y);
  for (std::size_t k = p; k-- > 0;) {
    beta[k] = dot(b.qw.col(k), z) / b.pivots[k];
    if (k > 0) axpy_sub(z.span(), beta[k], x.col(k));
  }
  return beta;
}

/// (X^T W X)^{-1} X^T W by an in-place sweep over B = W X:
///   d_0 = <B_0, x_0>
///   for i = 1..p-1:
///     B_j -= B_{i-1} <B_{i-1}, x_j> / d_{i-1}   for j >= i
///     d_i  = <B_i, x_i>
///     B_l -= B_i <x_i, B_l> / d_i               for l < i
///   return diag(1/d) B^T
/// d_0 uses W x_0 rather than x_0 so the sweep stays consistent for W != I.
inline PseudoInverse weighted_geninv(const DenseMatrix& x, const DenseMatrix& w,
                                     double pivot_floor = default_pivot_floor) {
  detail::check_weighted_shapes(x, w, pivot_floor);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  DenseMatrix bm = multiply(w, x);
  DenseVector d(p);
  d[0] = dot(bm.col(0), x.col(0));
  detail::check_weighted_pivot(d[0], 0.0, pivot_floor, 0);
  double running_max = std::abs(d[0]);
  for (std::size_t i = 1; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double c = dot(bm.col(i - 1), x.col(j)) / d[i - 1];
      axpy_sub(bm.col(j), c, bm.col(i - 1));
    }
    d[i] = dot(bm.col(i), x.col(i));
    detail::check_weighted_pivot(d[i], running_max, pivot_floor, i);
    running_max = std::max(running_max, std::abs(d[i]));
    for (std::size_t l = 0; l < i; ++l) {
      const double c = dot(x.col(i), bm.col(l)) / d[i];
      axpy_sub(bm.col(l), c, bm.col(i));
    }
  }
  PseudoInverse out{DenseMatrix(p, n), n, p};
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 0; c < n; ++c) out.rows(i, c) = bm(c, i) / d[i];
  return out;
}

}  // namespace cfls
