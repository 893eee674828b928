#include "wabc/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wabc {

double solve_assignment(const Matrix& cost, std::vector<int>& row_to_col) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n || n < 1)
    throw std::invalid_argument("solve_assignment: square matrix required");

  // The augmenting scan below sweeps one row at a time; a row-major copy
  // keeps that scan contiguous instead of striding across the column-major
  // input, which dominates the runtime for n in the hundreds.
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double e = cost(i, j);
      if (!std::isfinite(e))
        throw std::invalid_argument("solve_assignment: non-finite cost entry");
      c[static_cast<std::size_t>(i) * n + j] = e;
    }

  const double kInf = std::numeric_limits<double>::infinity();
  // 1-based; p[j] = row matched to column j, column 0 is a virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      const double ui0 = u[i0];
      const double* crow = c.data() + static_cast<std::size_t>(i0 - 1) * n;
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = crow[j - 1] - ui0 - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  row_to_col.assign(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (p[j] == 0) continue;
    row_to_col[p[j] - 1] = j - 1;
    total += c[static_cast<std::size_t>(p[j] - 1) * n + (j - 1)];
  }
  return total;
}

}  // namespace wabc
