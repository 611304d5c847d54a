#pragma once

// Brute-force reference solvers for tests and the `verify` command. They use
// row-pivoted elimination on explicitly formed normal equations and share
// nothing with the SGSO / upper-factor code beyond matrix.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"

namespace cfls::oracle {

struct OracleSolution {
  DenseVector beta;
  std::string method_tag;
};

namespace detail {

inline constexpr double singular_tol = 1e-13;

// Solves A X = B in place (A p x p, B p x m) with partial pivoting, in
// extended precision.
inline DenseMatrix eliminate(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t p = a.rows();
  if (a.cols() != p || b.rows() != p) throw DimensionError("oracle: system is not square");
  const std::size_t m = b.cols();
  std::vector<std::vector<long double>> aug(p, std::vector<long double>(p + m));
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) aug[r][c] = a(r, c);
    for (std::size_t c = 0; c < m; ++c) aug[r][p + c] = b(r, c);
  }
  const long double scale = std::max(max_abs(a), 1e-300);
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[best][col])) best = r;
    if (std::abs(aug[best][col]) <= singular_tol * scale)
      throw SingularSystem("oracle: singular system at column " + std::to_string(col + 1));
    std::swap(aug[col], aug[best]);
    for (std::size_t r = col + 1; r < p; ++r) {
      const long double f = aug[r][col] / aug[col][col];
      if (f == 0.0L) continue;
      for (std::size_t c = col; c < p + m; ++c) aug[r][c] -= f * aug[col][c];
    }
  }
  DenseMatrix x(p, m);
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = p; r-- > 0;) {
      long double v = aug[r][p + c];
      for (std::size_t k = r + 1; k < p; ++k) v -= aug[r][k] * x(k, c);
      x(r, c) = static_cast<double>(v / aug[r][r]);
    }
  return x;
}

}  // namespace detail

/// Solves X^T X beta = X^T y by partial-pivot Gaussian elimination.
inline OracleSolution gauss_solve_normal_equations(const DenseMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows()) throw DimensionError("oracle: response length mismatch");
  const DenseMatrix g = gram(x);
  DenseMatrix rhs(x.cols(), 1);
  for (std::size_t i = 0; i < x.cols(); ++i) rhs(i, 0) = dot(x.col(i), y);
  return {detail::eliminate(g, rhs).column(0), "gauss-normal-eq"};
}

/// Inverse by elimination on [A | I].
inline DenseMatrix gauss_inverse(const DenseMatrix& a) {
  return detail::eliminate(a, DenseMatrix::identity(a.rows()));
}

struct P4Coefficients {
  double beta3 = 0.0;
  double beta4 = 0.0;
};

/// Explicit four-regressor closed forms for the last two coefficients via
/// the projector P.12 that removes span(x1, x2). P.12 is applied as an
/// action, never formed.
inline P4Coefficients closed_form_p4(const DenseMatrix& x, std::span<const double> y) {
  if (x.cols() != 4) throw DimensionError("closed_form_p4: need exactly 4 columns");
  if (y.size() != x.rows()) throw DimensionError("closed_form_p4: response length mismatch");
  const auto x1 = x.col(0), x2 = x.col(1), x3 = x.col(2), x4 = x.col(3);
  const double s11 = dot(x1, x1);
  const double s12 = dot(x1, x2);
  const double s22 = dot(x2, x2);
  const double p12_denom = s22 - s12 * s12 / s11;
  if (!(s11 > 0.0) || std::abs(p12_denom) <= detail::singular_tol * s22)
    throw SingularSystem("closed_form_p4: x1, x2 are collinear");

  DenseVector x2t(x2);
  axpy_sub(x2t.span(), s12 / s11, x1);

  auto project = [&](std::span<const double> v) {
    DenseVector out(v);
    axpy_sub(out.span(), dot(x1, v) / s11, x1);
    axpy_sub(out.span(), dot(x2t, v) / p12_denom, x2t);
    return out;
  };
  const DenseVector p3 = project(x3), p4 = project(x4), py = project(y);
  const double a33 = dot(x3, p3);
  const double a34 = dot(x3, p4);
  const double a44 = dot(x4, p4);
  const double b3 = dot(x3, py);
  const double b4 = dot(x4, py);
  const double denom = a33 * a44 - a34 * a34;
  if (std::abs(denom) <= detail::singular_tol * std::abs(a33 * a44))
    throw SingularSystem("closed_form_p4: x3, x4 are collinear given x1, x2");
  return {(a44 * b3 - a34 * b4) / denom, (a33 * b4 - a34 * b3) / denom};
}

}  // namespace cfls::oracle
