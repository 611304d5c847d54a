#include <gtest/gtest.h>

#include <cmath>

#include "cfls/geninv.hpp"
#include "cfls/gram_lu.hpp"
#include "cfls/ols.hpp"
#include "cfls/oracle.hpp"
#include "cfls/weighted.hpp"
#include "test_support.hpp"

using namespace cfls;

namespace {

DenseVector positive_weights(std::size_t n, support::Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 5.0);
  DenseVector w(n);
  for (double& v : w) v = u(rng);
  return w;
}

// OLS on (W^{1/2} X, W^{1/2} y) for diagonal W, solved by the oracle.
DenseVector sqrt_w_oracle(const DenseMatrix& x, const DenseVector& w, const DenseVector& y) {
  DenseMatrix xs = x;
  DenseVector ys = y;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double s = std::sqrt(w[r]);
    for (std::size_t c = 0; c < x.cols(); ++c) xs(r, c) *= s;
    ys[r] *= s;
  }
  return oracle::gauss_solve_normal_equations(xs, ys).beta;
}

// Symmetric indefinite weights: Q diag(+-l) Q^T.
DenseMatrix indefinite_weights(std::size_t n, support::Rng& rng) {
  const DenseMatrix q = support::random_orthonormal(n, n, rng);
  std::uniform_real_distribution<double> mag(0.5, 3.0);
  DenseVector ev(n);
  for (std::size_t k = 0; k < n; ++k) ev[k] = (k % 2 ? -1.0 : 1.0) * mag(rng);
  DenseMatrix w = multiply(multiply(q, DenseMatrix::diagonal(ev)), q.transpose());
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t r = c + 1; r < n; ++r) w(c, r) = w(r, c);
  return w;
}

double normal_equation_residual(const DenseMatrix& x, const DenseMatrix& w, const DenseVector& y,
                                const DenseVector& beta) {
  const DenseMatrix xtw = multiply(x.transpose(), w);
  const DenseVector lhs = multiply(multiply(xtw, x), beta);
  const DenseVector rhs = multiply(xtw, y);
  double num = 0.0;
  for (std::size_t k = 0; k < lhs.size(); ++k) num += (lhs[k] - rhs[k]) * (lhs[k] - rhs[k]);
  return std::sqrt(num) / std::sqrt(dot(rhs, rhs));
}

}  // namespace

TEST(WeightedSgso, IdentityReducesToSgso) {
  support::Rng rng(1);
  const DenseMatrix x = support::random_matrix(12, 4, rng);
  const WeightedBasis wb = weighted_sgso(x, DenseMatrix::identity(12));
  const SgsoBasis b = sgso(x);
  EXPECT_LE(support::max_abs_diff(wb.qw, b.q), 1e-12 * max_abs(b.q));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(support::rel_err(wb.pivots[i], b.d[i]), 1e-12);
}

TEST(WeightedSgso, ScaledIdentityDoubles) {
  support::Rng rng(2);
  const DenseMatrix x = support::random_matrix(10, 3, rng);
  DenseMatrix w2 = DenseMatrix::identity(10);
  for (std::size_t k = 0; k < 10; ++k) w2(k, k) = 2.0;
  const WeightedBasis wb = weighted_sgso(x, w2);
  const SgsoBasis b = sgso(x);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(support::rel_err(wb.pivots[i], 2 * b.d[i]), 1e-12);
    for (std::size_t r = 0; r < 10; ++r) EXPECT_NEAR(wb.qw(r, i), 2 * b.q(r, i), 1e-12 * max_abs(b.q));
  }
}

TEST(WeightedSgso, PivotsMatchSqrtWTransformedSgso) {
  const DenseMatrix x{{1, 1}, {1, 2}, {1, 3}};
  const DenseVector w{1, 1, 4};
  const WeightedBasis wb = weighted_sgso(x, diagonal_weights(w));
  DenseMatrix xs = x;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) xs(r, c) *= std::sqrt(w[r]);
  const SgsoBasis b = sgso(xs);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(wb.pivots[i], b.d[i], 1e-12 * b.d[i]);
}

TEST(WeightedSgso, Triangularity) {
  support::Rng rng(3);
  const DenseMatrix x = support::random_matrix(15, 5, rng);
  const DenseMatrix w = indefinite_weights(15, rng);
  const WeightedBasis wb = weighted_sgso(x, w);
  const DenseMatrix uw = multiply(wb.qw.transpose(), x);
  const double scale = max_abs(uw);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(uw(i, i), wb.pivots[i], 1e-10 * scale);
    for (std::size_t j = 0; j < i; ++j) EXPECT_LE(std::abs(uw(i, j)), 1e-10 * scale);
  }
}

TEST(WeightedSgso, Errors) {
  DenseMatrix w = DenseMatrix::identity(3);
  w(0, 1) = 0.5;
  EXPECT_THROW(weighted_sgso(DenseMatrix{{1}, {2}, {3}}, w), NotSymmetric);
  EXPECT_THROW(weighted_sgso(DenseMatrix{{1}, {2}, {3}}, DenseMatrix::identity(2)), DimensionError);
  EXPECT_THROW(weighted_sgso(DenseMatrix{{1, 2}, {2, 4}, {3, 6}}, DenseMatrix::identity(3)), RankDeficient);
  // x^T W x == 0 for an indefinite W
  EXPECT_THROW(weighted_sgso(DenseMatrix{{1}, {1}}, DenseMatrix{{1, 0}, {0, -1}}), RankDeficient);
}

TEST(WeightedCoeffs, IdentityEqualsOls) {
  support::Rng rng(4);
  const auto inst = support::random_instance(25, 4, rng);
  const DenseMatrix w = DenseMatrix::identity(25);
  const DenseVector beta = weighted_coeffs(inst.x, w, inst.y, weighted_sgso(inst.x, w));
  EXPECT_LE(support::max_rel_err(beta, solve_all(lu_upper_augmented(inst.x, inst.y))), 1e-12);
}

TEST(WeightedCoeffs, DiagonalMatchesSqrtWOracle) {
  support::Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = support::random_instance(30, 3, rng);
    const DenseVector w = positive_weights(30, rng);
    const DenseMatrix wm = diagonal_weights(w);
    const DenseVector beta = weighted_coeffs(inst.x, wm, inst.y, weighted_sgso(inst.x, wm));
    EXPECT_LE(support::max_rel_err(beta, sqrt_w_oracle(inst.x, w, inst.y)), 1e-8);
  }
}

TEST(WeightedCoeffs, IndefiniteSatisfiesNormalEquations) {
  support::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = support::random_instance(12, 3, rng, 0.5);
    const DenseMatrix w = indefinite_weights(12, rng);
    const DenseVector beta = weighted_coeffs(inst.x, w, inst.y, weighted_sgso(inst.x, w));
    EXPECT_LE(normal_equation_residual(inst.x, w, inst.y, beta), 1e-8);

    // same answer as eliminating X^T W X directly
    const DenseMatrix xtw = multiply(inst.x.transpose(), w);
    DenseMatrix rhs(3, 1);
    const DenseVector b = multiply(xtw, inst.y);
    for (std::size_t k = 0; k < 3; ++k) rhs(k, 0) = b[k];
    const DenseVector ref = multiply(oracle::gauss_inverse(multiply(xtw, inst.x)), b);
    EXPECT_LE(support::max_rel_err(beta, ref), 1e-8);
  }
}

TEST(WeightedCoeffs, DimensionMismatch) {
  const DenseMatrix x{{1}, {2}, {3}};
  const DenseMatrix w = DenseMatrix::identity(3);
  const WeightedBasis wb = weighted_sgso(x, w);
  EXPECT_THROW(weighted_coeffs(x, w, DenseVector{1, 2}, wb), DimensionError);
}

TEST(WeightedGeninv, IdentityOrthonormalColumnsIsTranspose) {
  support::Rng rng(7);
  const DenseMatrix x = support::random_orthonormal(6, 3, rng);
  EXPECT_LE(support::max_abs_diff(weighted_geninv(x, DenseMatrix::identity(6)).rows, x.transpose()), 1e-13);
}

TEST(WeightedGeninv, IdentityMatchesGeneralizedInverse) {
  support::Rng rng(8);
  const auto inst = support::random_instance(20, 4, rng);
  const DenseMatrix a = weighted_geninv(inst.x, DenseMatrix::identity(20)).rows;
  const DenseMatrix b = generalized_inverse(inst.x).rows;
  EXPECT_LE(support::max_abs_diff(a, b), 1e-10 * max_abs(b));
}

TEST(WeightedGeninv, DiagonalMatchesOracle) {
  support::Rng rng(9);
  const auto inst = support::random_instance(20, 4, rng);
  const DenseMatrix w = diagonal_weights(positive_weights(20, rng));
  const DenseMatrix xtw = multiply(inst.x.transpose(), w);
  const DenseMatrix ref = multiply(oracle::gauss_inverse(multiply(xtw, inst.x)), xtw);
  const PseudoInverse p = weighted_geninv(inst.x, w);
  EXPECT_LE(support::max_abs_diff(p.rows, ref), 1e-8 * max_abs(ref));
  EXPECT_LE(support::max_abs_diff(multiply(p.rows, inst.x), DenseMatrix::identity(4)), 1e-10 * 4);
}

TEST(WeightedGeninv, IndefiniteBiorthogonal) {
  support::Rng rng(10);
  const auto inst = support::random_instance(14, 4, rng, 0.5);
  const DenseMatrix w = indefinite_weights(14, rng);
  const PseudoInverse p = weighted_geninv(inst.x, w);
  EXPECT_LE(support::max_abs_diff(multiply(p.rows, inst.x), DenseMatrix::identity(4)), 1e-9 * 4);
  // coefficients via the sweep agree with the projector chain
  const DenseVector a = multiply(p.rows, inst.y);
  const DenseVector b = weighted_coeffs(inst.x, w, inst.y, weighted_sgso(inst.x, w));
  EXPECT_LE(support::max_rel_err(a, b), 1e-8);
}

TEST(WeightedGeninv, Errors) {
  DenseMatrix w = DenseMatrix::identity(3);
  w(2, 0) = 1.0;
  EXPECT_THROW(weighted_geninv(DenseMatrix{{1}, {2}, {3}}, w), NotSymmetric);
  EXPECT_THROW(weighted_geninv(DenseMatrix{{1, 2}, {2, 4}, {3, 6}}, DenseMatrix::identity(3)), RankDeficient);
}
