#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfls/cfls.hpp"

namespace cfls::cli {

enum class Command { fit, coeff, pinv, precision, wfit, epistasis, verify };

struct RunConfig {
  Command command = Command::fit;
  std::string input;
  bool header = true;
  std::string response;
  std::vector<std::string> columns;  // empty: every column not used elsewhere
  std::vector<std::string> squares;  // appended as derived regressors name^2
  bool intercept = false;
  double pivot_floor = default_pivot_floor;
  std::uint64_t seed = 1;
  std::size_t n_perm = 0;
  unsigned threads = 1;
  std::string output;  // empty: stdout

  std::size_t index = 0;      // coeff, 1-based
  std::size_t prec_i = 0;     // precision, 1-based
  std::size_t prec_j = 0;
  bool full = false;          // precision --full
  std::string weights;        // wfit
  std::string pheno;          // epistasis
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_singular = 3;

namespace detail {

struct Design {
  DenseMatrix x;
  std::vector<std::string> names;
};

inline std::vector<std::size_t> regressor_columns(const Table& t, const RunConfig& cfg,
                                                  std::optional<std::size_t> excluded) {
  std::vector<std::size_t> idx;
  if (!cfg.columns.empty()) {
    for (const auto& sel : cfg.columns) idx.push_back(t.resolve(sel));
  } else {
    for (std::size_t j = 0; j < t.data.cols(); ++j)
      if (!excluded || j != *excluded) idx.push_back(j);
  }
  if (idx.empty()) throw DimensionError("no regressor columns selected");
  return idx;
}

// Selected columns, then squared columns, with the ones column first when
// `with_ones` is set.
inline Design build_design(const Table& t, const RunConfig& cfg,
                           std::optional<std::size_t> excluded, bool with_ones) {
  std::vector<DenseVector> cols;
  Design d;
  if (with_ones) {
    cols.emplace_back(t.data.rows(), 1.0);
    d.names.emplace_back("(intercept)");
  }
  for (std::size_t j : regressor_columns(t, cfg, excluded)) {
    cols.push_back(t.data.column(j));
    d.names.push_back(t.column_name(j));
  }
  for (const auto& sel : cfg.squares) {
    const std::size_t j = t.resolve(sel);
    DenseVector v = t.data.column(j);
    for (double& e : v) e *= e;
    cols.push_back(std::move(v));
    d.names.push_back(t.column_name(j) + "^2");
  }
  d.x = DenseMatrix::from_columns(cols);
  return d;
}

inline std::size_t require_response(const Table& t, const RunConfig& cfg) {
  if (cfg.response.empty()) throw DimensionError("--response is required");
  return t.resolve(cfg.response);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(b), std::numeric_limits<double>::min());
  return std::abs(a - b) / scale;
}

inline std::size_t one_based(std::size_t k, std::size_t p, const char* flag) {
  if (k < 1 || k > p)
    throw DimensionError(std::string(flag) + " " + std::to_string(k) + " out of range 1.." +
                         std::to_string(p));
  return k - 1;
}

inline void print_terms(std::ostream& out, const std::vector<std::string>& names,
                        const DenseVector& beta) {
  out << "term,estimate\n";
  for (std::size_t k = 0; k < beta.size(); ++k)
    out << quote_field(names[k]) << ',' << format_scalar(beta[k]) << '\n';
}

inline std::string na_or(double v) { return std::isnan(v) ? "NA" : format_scalar(v); }

inline void run_fit(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  const std::size_t yi = require_response(t, cfg);
  d = build_design(t, cfg, yi, false);
  if (cfg.intercept) d.names.insert(d.names.begin(), "(intercept)");
  const FitResult r = fit(d.x, t.data.col(yi), cfg.intercept, cfg.pivot_floor);
  print_terms(out, d.names, r.beta);
  out << "rss," << format_scalar(r.rss) << '\n';
  out << "dof," << r.dof << '\n';
}

inline void run_coeff(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  const std::size_t yi = require_response(t, cfg);
  d = build_design(t, cfg, yi, cfg.intercept);
  const std::size_t i = one_based(cfg.index, d.x.cols(), "--index");
  const SgsoBasis b = sgso(d.x, cfg.pivot_floor);
  out << format_scalar(coeff_single(i, d.x, t.data.col(yi), b)) << '\n';
}

inline void run_pinv(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  d = build_design(t, cfg, std::nullopt, cfg.intercept);
  const PseudoInverse p = generalized_inverse(d.x, cfg.pivot_floor, cfg.threads);
  write_csv(out, p.rows);
}

inline void run_precision(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  d = build_design(t, cfg, std::nullopt, cfg.intercept);
  if (cfg.full) {
    const PseudoInverse p = generalized_inverse(d.x, cfg.pivot_floor, cfg.threads);
    write_csv(out, precision_matrix(p), d.names);
    return;
  }
  const std::size_t i = one_based(cfg.prec_i, d.x.cols(), "--i");
  const std::size_t j = one_based(cfg.prec_j, d.x.cols(), "--j");
  out << format_scalar(precision_element(i, j, d.x, cfg.pivot_floor)) << '\n';
}

inline DenseMatrix load_weights(const RunConfig& cfg, std::size_t n) {
  if (cfg.weights.empty()) throw DimensionError("--weights is required");
  const Table w = read_csv_file(cfg.weights, false);
  if (w.data.cols() == 1 && w.data.rows() == n) return diagonal_weights(w.data.col(0));
  if (w.data.rows() == n && w.data.cols() == n) return w.data;
  throw DimensionError("weights must be " + std::to_string(n) + "x1 or " + std::to_string(n) +
                       "x" + std::to_string(n) + ", got " + std::to_string(w.data.rows()) + "x" +
                       std::to_string(w.data.cols()));
}

inline void run_wfit(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  const std::size_t yi = require_response(t, cfg);
  d = build_design(t, cfg, yi, cfg.intercept);
  const DenseMatrix w = load_weights(cfg, d.x.rows());
  const WeightedBasis b = weighted_sgso(d.x, w, cfg.pivot_floor);
  print_terms(out, d.names, weighted_coeffs(d.x, w, t.data.col(yi), b));
}

inline void run_epistasis(const RunConfig& cfg, const Table& t, std::ostream& out) {
  if (cfg.pheno.empty()) throw DimensionError("--pheno is required");
  const std::size_t pi = t.resolve(cfg.pheno);
  const std::vector<std::size_t> loci = regressor_columns(t, cfg, pi);
  std::vector<DenseVector> cols;
  for (std::size_t j : loci) cols.push_back(t.data.column(j));
  const DenseMatrix g = DenseMatrix::from_columns(cols);
  const auto pheno = t.data.col(pi);
  const auto stats = pairwise_scan(g, pheno, cfg.pivot_floor, cfg.threads);

  out << "i,j,beta3,tstat,dof" << (cfg.n_perm > 0 ? ",p_perm" : "") << '\n';
  for (const auto& s : stats) {
    out << quote_field(t.column_name(loci[s.i])) << ',' << quote_field(t.column_name(loci[s.j]))
        << ',' << na_or(s.beta3) << ',' << na_or(s.tstat) << ',' << s.dof;
    if (cfg.n_perm > 0) {
      out << ',';
      if (s.skipped)
        out << "NA";
      else
        out << format_scalar(permutation_pvalue(g.col(s.i), g.col(s.j), pheno, cfg.n_perm,
                                                cfg.seed, cfg.threads, cfg.pivot_floor));
    }
    out << '\n';
  }
}

inline void run_verify(const RunConfig& cfg, const Table& t, Design& d, std::ostream& out) {
  const std::size_t yi = require_response(t, cfg);
  d = build_design(t, cfg, yi, cfg.intercept);
  const auto y = t.data.col(yi);
  const DenseVector reference = oracle::gauss_solve_normal_equations(d.x, y).beta;

  const DenseVector recursive = solve_all(lu_upper_augmented(d.x, y, cfg.pivot_floor));
  const SgsoBasis b = sgso(d.x, cfg.pivot_floor);
  DenseVector single(d.x.cols());
  for (std::size_t i = 0; i < single.size(); ++i) single[i] = coeff_single(i, d.x, y, b);
  const DenseVector via_pinv = multiply(generalized_inverse(d.x, b, cfg.threads).rows, y);
  const FitResult fitted = fit(d.x, y, false, cfg.pivot_floor);

  auto worst = [&](const DenseVector& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, rel_diff(v[k], reference[k]));
    return m;
  };
  const double checks[] = {worst(recursive), worst(single), worst(via_pinv), worst(fitted.beta)};
  const char* labels[] = {"solve_all", "coeff_single", "pinv_y", "fit"};
  out << "check,max_rel_discrepancy\n";
  double overall = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    out << labels[k] << ',' << format_scalar(checks[k]) << '\n';
    overall = std::max(overall, checks[k]);
  }
  out << "max," << format_scalar(overall) << '\n';
}

inline std::string column_label(const Design& d, std::size_t column) {
  if (column < d.names.size()) return "'" + d.names[column] + "' (" + std::to_string(column + 1) + ")";
  return std::to_string(column + 1);
}

}  // namespace detail

/// Executes one command. Exit codes: 0 success, 2 input/dimension errors,
/// 3 rank deficiency or singular systems.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::Design design;
  try {
    const Table t = read_csv_file(cfg.input, cfg.header);
    std::ostringstream buffer;
    switch (cfg.command) {
      case Command::fit: detail::run_fit(cfg, t, design, buffer); break;
      case Command::coeff: detail::run_coeff(cfg, t, design, buffer); break;
      case Command::pinv: detail::run_pinv(cfg, t, design, buffer); break;
      case Command::precision: detail::run_precision(cfg, t, design, buffer); break;
      case Command::wfit: detail::run_wfit(cfg, t, design, buffer); break;
      case Command::epistasis: detail::run_epistasis(cfg, t, buffer); break;
      case Command::verify: detail::run_verify(cfg, t, design, buffer); break;
    }
    if (cfg.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw DimensionError("cannot write '" + cfg.output + "'");
      file << buffer.str();
    }
    return exit_ok;
  } catch (const RankDeficient& e) {
    err << "error: rank deficient: column " << detail::column_label(design, e.column())
        << " is linearly dependent on the preceding columns\n";
    return exit_singular;
  } catch (const SingularSystem& e) {
    err << "error: " << e.what() << '\n';
    return exit_singular;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_input;
  }
}

/// Parses argv into a RunConfig and runs it.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Closed-form least squares without inversion or normalization"};
  app.require_subcommand(1);
  RunConfig cfg;
  bool no_header = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Input CSV")->required();
    sub->add_flag("--no-header", no_header, "First row is data, not column names");
    sub->add_option("--columns", cfg.columns, "Regressor columns (names or 1-based indices)")
        ->delimiter(',');
    sub->add_option("--square", cfg.squares, "Append the square of a column as a regressor");
    sub->add_flag("--intercept", cfg.intercept, "Prepend a column of ones");
    sub->add_option("--pivot-floor", cfg.pivot_floor, "Relative pivot floor")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output", cfg.output, "Write output here instead of stdout");
  };
  auto with_response = [&](CLI::App* sub) {
    sub->add_option("--response", cfg.response, "Response column")->required();
  };

  auto* fit_cmd = app.add_subcommand("fit", "All coefficients, rss and dof");
  common(fit_cmd);
  with_response(fit_cmd);

  auto* coeff_cmd = app.add_subcommand("coeff", "A single coefficient through the projector chain");
  common(coeff_cmd);
  with_response(coeff_cmd);
  coeff_cmd->add_option("--index", cfg.index, "1-based coefficient index")->required();

  auto* pinv_cmd = app.add_subcommand("pinv", "Left generalized inverse as CSV");
  common(pinv_cmd);

  auto* prec_cmd = app.add_subcommand("precision", "Precision matrix element or full matrix");
  common(prec_cmd);
  auto* opt_i = prec_cmd->add_option("--i", cfg.prec_i, "1-based row");
  auto* opt_j = prec_cmd->add_option("--j", cfg.prec_j, "1-based column");
  auto* opt_full = prec_cmd->add_flag("--full", cfg.full, "Write the whole matrix as CSV");
  opt_i->needs(opt_j);
  opt_j->needs(opt_i);
  opt_full->excludes(opt_i)->excludes(opt_j);

  auto* wfit_cmd = app.add_subcommand("wfit", "Weighted coefficients");
  common(wfit_cmd);
  with_response(wfit_cmd);
  wfit_cmd->add_option("--weights", cfg.weights, "n x n weight matrix or n x 1 diagonal (CSV, no header)")
      ->required();

  auto* epi_cmd = app.add_subcommand("epistasis", "Pairwise interaction scan");
  common(epi_cmd);
  epi_cmd->add_option("--pheno", cfg.pheno, "Phenotype column")->required();
  epi_cmd->add_option("--perms", cfg.n_perm, "Permutations per pair (0: none)");
  epi_cmd->add_option("--seed", cfg.seed, "Permutation seed");

  auto* verify_cmd = app.add_subcommand("verify", "Compare every solver against the elimination oracle");
  common(verify_cmd);
  with_response(verify_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }
  if (prec_cmd->parsed() && !cfg.full && cfg.prec_i == 0) {
    err << "error: precision needs --i/--j or --full\n";
    return exit_input;
  }
  cfg.header = !no_header;
  if (fit_cmd->parsed()) cfg.command = Command::fit;
  else if (coeff_cmd->parsed()) cfg.command = Command::coeff;
  else if (pinv_cmd->parsed()) cfg.command = Command::pinv;
  else if (prec_cmd->parsed()) cfg.command = Command::precision;
  else if (wfit_cmd->parsed()) cfg.command = Command::wfit;
  else if (epi_cmd->parsed()) cfg.command = Command::epistasis;
  else cfg.command = Command::verify;
  return run(cfg, out, err);
}

}  // namespace cfls::cli
