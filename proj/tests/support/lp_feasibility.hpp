#pragma once

// Test-only oracle: is x a convex combination of the given points? Decides
// feasibility of
//    P^T w = x,  1^T w = 1,  w >= 0
// with a dense phase-1 simplex (Bland's rule, so it cannot cycle). Kept
// deliberately independent of the hull implementation it cross-checks.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oddforge::testing {

inline bool in_convex_hull_lp(const std::vector<std::vector<double>>& points,
                              const std::vector<double>& x, double tol) {
  const std::size_t n = points.size();
  const std::size_t d = x.size();
  const std::size_t rows = d + 1;  // d coordinate constraints + the sum-to-one row

  // tableau: rows x (n structural + rows artificial + rhs)
  std::vector<std::vector<double>> tab(rows, std::vector<double>(n + rows + 1, 0.0));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < n; ++c) tab[r][c] = points[c][r];
    tab[r][n + rows] = x[r];
  }
  for (std::size_t c = 0; c < n; ++c) tab[d][c] = 1.0;
  tab[d][n + rows] = 1.0;

  // flip rows with negative rhs so artificial variables start feasible
  for (std::size_t r = 0; r < rows; ++r) {
    if (tab[r][n + rows] < 0.0) {
      for (auto& v : tab[r]) v = -v;
    }
    tab[r][n + r] = 1.0;
  }

  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = n + r;

  // phase-1 objective: minimize the sum of artificials; reduced costs start
  // as column sums over the constraint rows.
  std::vector<double> cost(n + rows + 1, 0.0);
  for (std::size_t c = 0; c <= n + rows; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += tab[r][c];
    cost[c] = s;
  }
  for (std::size_t r = 0; r < rows; ++r) cost[n + r] = 0.0;

  const double eps = 1e-12;
  for (;;) {
    // Bland: entering = lowest-index column with positive reduced cost
    std::size_t enter = n + rows;
    for (std::size_t c = 0; c < n + rows; ++c) {
      if (cost[c] > eps) {
        enter = c;
        break;
      }
    }
    if (enter == n + rows) break;

    std::size_t leave = rows;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] > eps) {
        const double ratio = tab[r][n + rows] / tab[r][enter];
        if (leave == rows || ratio < best_ratio - eps ||
            (std::fabs(ratio - best_ratio) <= eps && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
    }
    if (leave == rows) break;  // unbounded cannot happen with w >= 0, sum w = 1

    const double pivot = tab[leave][enter];
    for (auto& v : tab[leave]) v /= pivot;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = tab[r][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= n + rows; ++c) tab[r][c] -= f * tab[leave][c];
    }
    const double cf = cost[enter];
    for (std::size_t c = 0; c <= n + rows; ++c) cost[c] -= cf * tab[leave][c];
    basis[leave] = enter;
  }

  double infeasibility = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] >= n) infeasibility += tab[r][n + rows];
  }
  return infeasibility <= tol;
}

}  // namespace oddforge::testing
