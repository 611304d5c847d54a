// Quadratic fit of tot on age: upper factor of the Gram matrix, its scaled
// rows, and the coefficients by back-recursion and by the projector chain.
//
//   demo_kidney_fit tests/data/kidney.csv

#include <iomanip>
#include <iostream>

#include "cfls/cfls.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " kidney.csv\n";
    return 2;
  }
  using namespace cfls;
  const Table t = read_csv_file(argv[1], true);
  DenseVector age = t.data.column(t.resolve("age"));
  DenseVector age2 = age;
  for (double& v : age2) v *= v;
  const DenseVector cols[] = {age, age2};
  const DenseMatrix x = prepend_ones(DenseMatrix::from_columns(cols));
  const auto y = t.data.col(t.resolve("tot"));

  const UpperFactor f = lu_upper_augmented(x, y);
  const DenseMatrix c = scaled_rows(f);
  std::cout << std::setprecision(8) << "U (with response column):\n";
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) std::cout << std::setw(16) << f.u(i, j);
    std::cout << std::setw(16) << (*f.uy)[i] << '\n';
  }
  std::cout << "C:\n";
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) std::cout << std::setw(16) << c(i, j);
    std::cout << '\n';
  }

  const DenseVector beta = solve_all(f);
  const SgsoBasis b = sgso(x);
  const char* names[] = {"(intercept)", "age", "age^2"};
  std::cout << "coefficients (back-recursion, projector chain):\n";
  for (std::size_t i = 0; i < 3; ++i)
    std::cout << std::setw(12) << names[i] << std::setw(16) << beta[i] << std::setw(16)
              << coeff_single(i, x, y, b) << '\n';
}
