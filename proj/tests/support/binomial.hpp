#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

namespace l1qr::testing {

// Exact law of |n - 2 Binomial(n, 1/2)| by Pascal's triangle; returns the
// smallest m with P(|n - 2B| <= m) >= q.
inline int abs_centered_binomial_quantile(int n, double q) {
  std::vector<double> row{1.0};
  for (int k = 0; k < n; ++k) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += 0.5 * row[j];
      next[j + 1] += 0.5 * row[j];
    }
    row.swap(next);
  }
  std::vector<double> mass(static_cast<std::size_t>(n) + 1, 0.0);
  for (int b = 0; b <= n; ++b) mass[static_cast<std::size_t>(std::abs(n - 2 * b))] += row[static_cast<std::size_t>(b)];
  double cdf = 0.0;
  for (int m = 0; m <= n; ++m) {
    cdf += mass[static_cast<std::size_t>(m)];
    if (cdf >= q - 1e-15) return m;
  }
  return n;
}

}  // namespace l1qr::testing
