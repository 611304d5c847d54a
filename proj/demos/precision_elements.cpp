// Single precision-matrix elements from two rows of the left generalized
// inverse, compared with the full matrix.

#include <iomanip>
#include <iostream>
#include <random>

#include "cfls/cfls.hpp"

int main() {
  using namespace cfls;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  DenseMatrix x(30, 4);
  for (std::size_t c = 0; c < 4; ++c)
    for (double& v : x.col(c)) v = normal(rng) + 0.5 * c;

  // s_13 needs only rows 1 and 3 of X+
  std::cout << std::setprecision(10) << "s_13 = " << precision_element(0, 2, x) << '\n';

  const DenseMatrix s = precision_matrix(generalized_inverse(x));
  std::cout << "full precision matrix:\n";
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) std::cout << std::setw(18) << s(i, j);
    std::cout << '\n';
  }
}
