#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "cfls/errors.hpp"
#include "cfls/gram_lu.hpp"
#include "cfls/matrix.hpp"
#include "cfls/parallel.hpp"
#include "cfls/sgso.hpp"

namespace cfls {

struct FitResult {
  DenseVector beta;
  DenseVector residuals;
  double rss = 0.0;
  std::ptrdiff_t dof = 0;
};

/// Back-recursion over the augmented factor:
///   beta_p = u_py / u_pp,
///   beta_i = u_iy / u_ii - sum_{j>i} beta_j u_ij / u_ii   (j ascending).
inline DenseVector solve_all(const UpperFactor& f) {
  if (!f.uy) throw DimensionError("solve_all: factor has no response column");
  const std::size_t p = f.size();
  DenseVector beta(p);
  for (std::size_t i = p; i-- > 0;) {
    const double pivot = f.u(i, i);
    double b = (*f.uy)[i] / pivot;
    for (std::size_t j = i + 1; j < p; ++j) b -= beta[j] * f.u(i, j) / pivot;
    beta[i] = b;
  }
  return beta;
}

namespace detail {

inline void check_basis(const DenseMatrix& x, const SgsoBasis& b) {
  if (b.q.rows() != x.rows() || b.q.cols() != x.cols())
    throw DimensionError("basis was not built from this design matrix");
}

inline void check_index(std::size_t i, std::size_t p, const char* who) {
  if (i >= p)
    throw DimensionError(std::string(who) + ": index " + std::to_string(i + 1) +
                         " out of range 1.." + std::to_string(p));
}

// Applies [I - x_k (q°_k)^T] to z for k = p-1 down to `stop` + 1, then
// returns (q°_stop)^T z. The coefficients of every k passed on the way are
// the same values this function returns for those k.
inline double projector_chain(std::size_t stop, const DenseMatrix& x, const SgsoBasis& b,
                              std::span<double> z) {
  for (std::size_t k = b.size(); k-- > stop + 1;) {
    const double coeff = dot(b.q.col(k), z) / b.d[k];
    axpy_sub(z, coeff, x.col(k));
  }
  return dot(b.q.col(stop), z) / b.d[stop];
}

}  // namespace detail

/// A single coefficient (0-based index) from the SGSO basis alone:
///   beta_i = (q°_i)^T [I - x_{i+1}(q°_{i+1})^T] ... [I - x_p(q°_p)^T] y,
/// evaluated right to left as O(n) vector updates.
inline double coeff_single(std::size_t i, const DenseMatrix& x, std::span<const double> y,
                           const SgsoBasis& b) {
  detail::check_basis(x, b);
  detail::check_index(i, b.size(), "coeff_single");
  if (y.size() != x.rows()) throw DimensionError("coeff_single: response length mismatch");
  DenseVector z(y);
  return detail::projector_chain(i, x, b, z.span());
}

/// coeff_single applied to every column of Y (e.g. permuted responses) with
/// one shared basis. Columns are independent and may run concurrently.
inline DenseVector coeff_under_y_permutations(std::size_t i, const DenseMatrix& x,
                                              const DenseMatrix& ys, const SgsoBasis& b,
                                              unsigned threads = 1) {
  detail::check_basis(x, b);
  detail::check_index(i, b.size(), "coeff_under_y_permutations");
  if (ys.rows() != x.rows())
    throw DimensionError("coeff_under_y_permutations: responses have " +
                         std::to_string(ys.rows()) + " rows, design has " +
                         std::to_string(x.rows()));
  DenseVector out(ys.cols());
  parallel_for(ys.cols(), threads, [&](std::size_t k) {
    DenseVector z(ys.col(k));
    out[k] = detail::projector_chain(i, x, b, z.span());
  });
  return out;
}

/// All coefficients from the SGSO basis, sharing one partially projected
/// vector: beta_i for i = p-1..0. Agrees bit-for-bit with coeff_single.
inline DenseVector coeffs_from_basis(const DenseMatrix& x, std::span<const double> y,
                                     const SgsoBasis& b) {
  detail::check_basis(x, b);
  if (y.size() != x.rows()) throw DimensionError("coeffs_from_basis: response length mismatch");
  const std::size_t p = b.size();
  DenseVector beta(p);
  DenseVector z(y);
  for (std::size_t k = p; k-- > 0;) {
    beta[k] = dot(b.q.col(k), z) / b.d[k];
    if (k > 0) axpy_sub(z.span(), beta[k], x.col(k));
  }
  return beta;
}

/// Full fit through the augmented upper factor. With `intercept`, a column
/// of ones is prepended and beta[0] is the intercept.
inline FitResult fit(const DenseMatrix& x, std::span<const double> y, bool intercept,
                     double pivot_floor = default_pivot_floor) {
  if (y.size() != x.rows())
    throw DimensionError("fit: response length " + std::to_string(y.size()) +
                         " does not match " + std::to_string(x.rows()) + " rows");
  const DenseMatrix design = intercept ? prepend_ones(x) : x;
  const auto dof = static_cast<std::ptrdiff_t>(design.rows()) -
                   static_cast<std::ptrdiff_t>(design.cols());
  if (dof <= 0)
    throw InsufficientRows("fit: " + std::to_string(design.rows()) + " rows for " +
                           std::to_string(design.cols()) + " coefficients");

  FitResult r;
  r.beta = solve_all(lu_upper_augmented(design, y, pivot_floor));
  r.residuals = DenseVector(y);
  for (std::size_t j = 0; j < design.cols(); ++j) axpy_sub(r.residuals.span(), r.beta[j], design.col(j));
  r.rss = dot(r.residuals, r.residuals);
  r.dof = dof;
  return r;
}

}  // namespace cfls
