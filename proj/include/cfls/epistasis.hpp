#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cfls/errors.hpp"
#include "cfls/matrix.hpp"
#include "cfls/parallel.hpp"
#include "cfls/sgso.hpp"

namespace cfls {

/// Interaction coefficient and t statistic for one locus pair.
/// `skipped` marks pairs whose design was rank deficient (beta3/tstat NaN).
struct PairStat {
  std::size_t i = 0;
  std::size_t j = 1;
  double beta3 = 0.0;
  double tstat = 0.0;
  std::ptrdiff_t dof = 0;
  bool skipped = false;
};

inline DenseVector centered(std::span<const double> v) {
  long double sum = 0.0L;
  for (double x : v) sum += x;
  const double mean = static_cast<double>(sum / static_cast<long double>(v.size()));
  DenseVector out(v);
  for (double& x : out) x -= mean;
  return out;
}

/// Centered (g_i | g_j | g_i*g_j) and its SGSO basis, built once per pair.
/// stat() handles any centered phenotype, so permuted phenotypes reuse the
/// basis and only the phenotype-side inner products are recomputed.
class InteractionModel {
 public:
  InteractionModel(std::span<const double> gi, std::span<const double> gj,
                   double pivot_floor = default_pivot_floor)
      : pivot_floor_(pivot_floor) {
    if (gi.size() != gj.size()) throw DimensionError("interaction: loci differ in length");
    if (gi.size() <= 4)
      throw InsufficientSamples("interaction: need at least 5 samples, got " +
                                std::to_string(gi.size()));
    std::vector<double> prod(gi.size());
    for (std::size_t k = 0; k < gi.size(); ++k) prod[k] = gi[k] * gj[k];
    const DenseVector cols[] = {centered(gi), centered(gj), centered(prod)};
    design_ = DenseMatrix::from_columns(cols);
    basis_ = sgso(design_, pivot_floor);
    interaction_pivot_ = dot(basis_.q.col(2), design_.col(2));
  }

  std::size_t samples() const noexcept { return design_.rows(); }

  /// beta3 = <q_I, p> / <q_I, I>,
  /// T = beta3 * sqrt((m - 4) <q_I, I> / <q_p, p>), q_p the phenotype residual.
  PairStat stat(std::span<const double> pheno_centered) const {
    if (pheno_centered.size() != samples())
      throw DimensionError("interaction: phenotype length mismatch");
    PairStat s;
    s.dof = static_cast<std::ptrdiff_t>(samples()) - 4;
    s.beta3 = dot(basis_.q.col(2), pheno_centered) / interaction_pivot_;
    const DenseVector qp = residual_against(basis_, pheno_centered);
    const double rss = dot(qp, pheno_centered);
    if (rss > pivot_floor_ * dot(pheno_centered, pheno_centered)) {
      s.tstat = s.beta3 * std::sqrt(static_cast<double>(s.dof) * interaction_pivot_ / rss);
    } else if (s.beta3 != 0.0) {
      // phenotype lies in the span of the design: exact fit
      s.tstat = std::copysign(std::numeric_limits<double>::infinity(), s.beta3);
    } else {
      s.tstat = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
  }

 private:
  double pivot_floor_;
  DenseMatrix design_;
  SgsoBasis basis_;
  double interaction_pivot_ = 0.0;
};

inline PairStat interaction_stat(std::span<const double> gi, std::span<const double> gj,
                                 std::span<const double> pheno,
                                 double pivot_floor = default_pivot_floor) {
  if (pheno.size() != gi.size()) throw DimensionError("interaction: phenotype length mismatch");
  const InteractionModel model(gi, gj, pivot_floor);
  return model.stat(centered(pheno));
}

/// One PairStat per pair i < j in lexicographic order. Rank-deficient pairs
/// are emitted with skipped = true.
inline std::vector<PairStat> pairwise_scan(const DenseMatrix& g, std::span<const double> pheno,
                                           double pivot_floor = default_pivot_floor,
                                           unsigned threads = 1) {
  const std::size_t loci = g.cols();
  if (loci < 2) throw DimensionError("pairwise_scan: need at least 2 loci");
  if (pheno.size() != g.rows()) throw DimensionError("pairwise_scan: phenotype length mismatch");
  if (g.rows() <= 4)
    throw InsufficientSamples("pairwise_scan: need at least 5 samples, got " +
                              std::to_string(g.rows()));
  const DenseVector pc = centered(pheno);

  std::vector<PairStat> out;
  out.reserve(loci * (loci - 1) / 2);
  for (std::size_t i = 0; i < loci; ++i)
    for (std::size_t j = i + 1; j < loci; ++j) out.push_back(PairStat{i, j, 0.0, 0.0, 0, false});

  parallel_for(out.size(), threads, [&](std::size_t k) {
    PairStat& slot = out[k];
    try {
      const InteractionModel model(g.col(slot.i), g.col(slot.j), pivot_floor);
      const PairStat s = model.stat(pc);
      slot.beta3 = s.beta3;
      slot.tstat = s.tstat;
      slot.dof = s.dof;
    } catch (const RankDeficient&) {
      slot.beta3 = slot.tstat = std::numeric_limits<double>::quiet_NaN();
      slot.dof = static_cast<std::ptrdiff_t>(g.rows()) - 4;
      slot.skipped = true;
    }
  });
  return out;
}

/// Uniform permutation of 0..n-1 for stream `index` under `seed`. Each
/// stream has its own generator, so permutations can be drawn in any order
/// or concurrently with identical results.
inline std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                                   std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 gen(seq);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // Fisher-Yates with rejection sampling; independent of the library's
  // distribution implementations.
  for (std::size_t k = n; k > 1; --k) {
    const std::uint64_t bound = k;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = gen();
    while (r >= limit);
    std::swap(perm[k - 1], perm[r % bound]);
  }
  return perm;
}

/// (1 + #{|T_perm| >= |T_obs|}) / (1 + #perms) over explicit permutations of
/// the phenotype.
inline double permutation_pvalue(std::span<const double> gi, std::span<const double> gj,
                                 std::span<const double> pheno,
                                 std::span<const std::vector<std::size_t>> perms,
                                 unsigned threads = 1, double pivot_floor = default_pivot_floor,
                                 std::vector<PairStat>* permuted_stats = nullptr) {
  if (perms.empty()) throw DimensionError("permutation_pvalue: need at least one permutation");
  if (pheno.size() != gi.size()) throw DimensionError("interaction: phenotype length mismatch");
  const InteractionModel model(gi, gj, pivot_floor);
  const DenseVector pc = centered(pheno);
  const double observed = std::abs(model.stat(pc).tstat);

  std::vector<PairStat> stats(perms.size());
  parallel_for(perms.size(), threads, [&](std::size_t k) {
    const auto& perm = perms[k];
    if (perm.size() != pc.size()) throw DimensionError("permutation has wrong length");
    DenseVector shuffled(pc.size());
    for (std::size_t r = 0; r < perm.size(); ++r) shuffled[r] = pc[perm[r]];
    stats[k] = model.stat(shuffled);
  });
  std::size_t hits = 0;
  for (const auto& s : stats)
    if (std::abs(s.tstat) >= observed) ++hits;
  if (permuted_stats) *permuted_stats = std::move(stats);
  return static_cast<double>(1 + hits) / static_cast<double>(1 + perms.size());
}

inline double permutation_pvalue(std::span<const double> gi, std::span<const double> gj,
                                 std::span<const double> pheno, std::size_t n_perm,
                                 std::uint64_t seed, unsigned threads = 1,
                                 double pivot_floor = default_pivot_floor) {
  if (n_perm == 0) throw DimensionError("permutation_pvalue: n_perm must be positive");
  std::vector<std::vector<std::size_t>> perms(n_perm);
  parallel_for(n_perm, threads,
               [&](std::size_t k) { perms[k] = random_permutation(pheno.size(), seed, k); });
  return permutation_pvalue(gi, gj, pheno, perms, threads, pivot_floor);
}

}  // namespace cfls
