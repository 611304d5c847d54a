#pragma once

// Random instance generators and comparison helpers shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>

#include "cfls/cfls.hpp"

namespace cfls::support {

using Rng = std::mt19937_64;

inline DenseMatrix random_matrix(std::size_t n, std::size_t p, Rng& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(n, p);
  for (std::size_t c = 0; c < p; ++c)
    for (double& v : m.col(c)) v = normal(rng);
  return m;
}

inline DenseVector random_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  DenseVector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline double frobenius(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

/// Upper bound on the 2-norm condition number of the Gram matrix:
/// ||G||_F ||G^{-1}||_F.
inline double gram_condition_bound(const DenseMatrix& x) {
  const DenseMatrix g = gram(x);
  return frobenius(g) * frobenius(oracle::gauss_inverse(g));
}

struct Instance {
  DenseMatrix x;
  DenseVector y;
  double condition = 0.0;
};

/// Gaussian design with columns rescaled by 10^U(-spread, spread) and a
/// response y = X beta + noise. Redrawn until cond(X^T X) <= max_condition.
inline Instance random_instance(std::size_t n, std::size_t p, Rng& rng, double spread = 1.5,
                                double max_condition = 1e8, double noise = 0.1) {
  std::uniform_real_distribution<double> expo(-spread, spread);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution sign;
  for (;;) {
    Instance inst;
    inst.x = random_matrix(n, p, rng);
    DenseVector beta(p);
    for (std::size_t c = 0; c < p; ++c) {
      const double s = std::pow(10.0, expo(rng));
      for (double& v : inst.x.col(c)) v *= s;
      beta[c] = (sign(rng) ? 1.0 : -1.0) * mag(rng) / s;
    }
    try {
      inst.condition = gram_condition_bound(inst.x);
    } catch (const SingularSystem&) {
      continue;
    }
    if (!(inst.condition <= max_condition)) continue;
    inst.y = multiply(inst.x, beta);
    const DenseVector e = random_vector(n, rng);
    for (std::size_t k = 0; k < n; ++k) inst.y[k] += noise * e[k];
    return inst;
  }
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

inline double max_rel_err(const DenseVector& a, const DenseVector& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, rel_err(a[k], b[k]));
  return m;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

inline DenseMatrix diag_inverse_times(const DenseVector& d, const DenseMatrix& u) {
  DenseMatrix out = u;
  for (std::size_t c = 0; c < u.cols(); ++c)
    for (std::size_t r = 0; r < u.rows(); ++r) out(r, c) /= d[r];
  return out;
}

/// Random orthogonal matrix by orthonormalizing a Gaussian matrix (test-only;
/// uses square roots deliberately).
inline DenseMatrix random_orthonormal(std::size_t n, std::size_t p, Rng& rng) {
  DenseMatrix m = random_matrix(n, p, rng);
  for (std::size_t j = 0; j < p; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) axpy_sub(m.col(j), dot(m.col(k), m.col(j)), m.col(k));
    const double norm = std::sqrt(dot(m.col(j), m.col(j)));
    for (double& v : m.col(j)) v /= norm;
  }
  return m;
}

inline std::string data_path(const std::string& name) {
  return std::string(CFLS_TEST_DATA) + "/" + name;
}

/// Kidney fixture design (1 | age | age^2) and response tot.
inline Instance kidney() {
  const Table t = read_csv_file(data_path("kidney.csv"), true);
  const std::size_t age = t.resolve("age");
  const std::size_t tot = t.resolve("tot");
  DenseVector age2 = t.data.column(age);
  for (double& v : age2) v *= v;
  const DenseVector cols[] = {t.data.column(age), age2};
  Instance inst;
  inst.x = prepend_ones(DenseMatrix::from_columns(cols));
  inst.y = t.data.column(tot);
  return inst;
}

/// Additive genotype codes in {0, 1, 2} with allele frequency U(0.1, 0.5);
/// redrawn while monomorphic.
inline DenseVector random_genotype(std::size_t m, Rng& rng) {
  std::uniform_real_distribution<double> freq(0.1, 0.5);
  for (;;) {
    std::binomial_distribution<int> allele(2, freq(rng));
    DenseVector g(m);
    for (double& v : g) v = allele(rng);
    if (std::any_of(g.begin(), g.end(), [&](double v) { return v != g[0]; })) return g;
  }
}

struct InteractionFit {
  double beta3 = 0.0;
  double tstat = 0.0;
};

/// pheno ~ 1 + gi + gj + gi*gj by the elimination oracle; classical
/// t = beta3 / sqrt(rss / (m - 4) * [(X^T X)^{-1}]_44).
inline InteractionFit oracle_interaction(const DenseVector& gi, const DenseVector& gj,
                                         const DenseVector& pheno) {
  const std::size_t m = gi.size();
  DenseMatrix x(m, 4);
  for (std::size_t k = 0; k < m; ++k) {
    x(k, 0) = 1.0;
    x(k, 1) = gi[k];
    x(k, 2) = gj[k];
    x(k, 3) = gi[k] * gj[k];
  }
  const DenseVector beta = oracle::gauss_solve_normal_equations(x, pheno).beta;
  const DenseMatrix inv = oracle::gauss_inverse(gram(x));
  long double rss = 0.0L;
  for (std::size_t k = 0; k < m; ++k) {
    long double r = pheno[k];
    for (std::size_t c = 0; c < 4; ++c) r -= static_cast<long double>(x(k, c)) * beta[c];
    rss += r * r;
  }
  const double sigma2 = static_cast<double>(rss) / static_cast<double>(m - 4);
  return {beta[3], beta[3] / std::sqrt(sigma2 * inv(3, 3))};
}

/// pheno = b3 * gi * gj + b1 * gi + b2 * gj + noise.
inline DenseVector simulate_phenotype(const DenseVector& gi, const DenseVector& gj, double b3,
                                      Rng& rng, double noise = 1.0) {
  std::normal_distribution<double> normal;
  DenseVector p(gi.size());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = 0.3 * gi[k] - 0.2 * gj[k] + b3 * gi[k] * gj[k] + noise * normal(rng);
  return p;
}

}  // namespace cfls::support
