// assignment.hpp: minimum-cost linear assignment (Kuhn-Munkres with
// potentials) on rectangular matrices, with a deterministic tie-break:
// among equal-cost optima the lexicographically smallest (row, col)
// sequence is returned.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace egotrack {

using CostMatrix = std::vector<std::vector<double>>;
using Assignment = std::vector<std::pair<int, int>>;

namespace detail {

// Potential-based Kuhn-Munkres for n rows <= m cols; assigns every row.
// Returns the matching as rowsol[row] = col.
inline double km_solve(const CostMatrix& cost, std::vector<int>& rowsol) {
  const int n = static_cast<int>(cost.size());
  const int m = n ? static_cast<int>(cost[0].size()) : 0;
  rowsol.assign(n, -1);
  if (n == 0) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
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

  double total = 0.0;
  for (int j = 1; j <= m; ++j) {
    if (p[j]) {
      rowsol[p[j] - 1] = j - 1;
      total += cost[p[j] - 1][j - 1];
    }
  }
  return total;
}

inline CostMatrix transpose(const CostMatrix& c) {
  const size_t n = c.size();
  const size_t m = n ? c[0].size() : 0;
  CostMatrix t(m, std::vector<double>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) t[j][i] = c[i][j];
  return t;
}

// Minimum cost of a matching of size min(n, m), any shape.
inline double optimal_cost(const CostMatrix& cost) {
  if (cost.empty() || cost[0].empty()) return 0.0;
  std::vector<int> rowsol;
  if (cost.size() <= cost[0].size()) return km_solve(cost, rowsol);
  return km_solve(transpose(cost), rowsol);
}

}  // namespace detail

// Minimum-total-cost matching of size min(n, m). The greedy refinement
// pins pairs in (row, col) order, keeping only choices that preserve the
// optimal total; this makes the output unique across tie configurations.
inline Assignment assign(const CostMatrix& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n ? static_cast<int>(cost[0].size()) : 0;
  if (n == 0 || m == 0) return {};
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != m) {
      throw std::invalid_argument("assign: ragged cost matrix");
    }
    for (double c : row) {
      if (!std::isfinite(c)) {
        throw std::invalid_argument("assign: non-finite cost entry");
      }
    }
  }

  double remaining = detail::optimal_cost(cost);
  int size_left = std::min(n, m);

  Assignment result;
  std::vector<int> rows(n), cols(m);
  for (int i = 0; i < n; ++i) rows[i] = i;
  for (int j = 0; j < m; ++j) cols[j] = j;

  // Sub-matrix over the still-unassigned rows/cols.
  auto submatrix = [&cost](const std::vector<int>& rs,
                           const std::vector<int>& cs) {
    CostMatrix sub(rs.size(), std::vector<double>(cs.size()));
    for (size_t a = 0; a < rs.size(); ++a)
      for (size_t b = 0; b < cs.size(); ++b) sub[a][b] = cost[rs[a]][cs[b]];
    return sub;
  };

  while (size_left > 0) {
    const int r = rows.front();
    const double eps = 1e-9 * (1.0 + std::abs(remaining));
    bool fixed = false;
    for (size_t cj = 0; cj < cols.size() && !fixed; ++cj) {
      const int c = cols[cj];
      std::vector<int> rest_rows(rows.begin() + 1, rows.end());
      std::vector<int> rest_cols = cols;
      rest_cols.erase(rest_cols.begin() + static_cast<long>(cj));
      if (static_cast<int>(std::min(rest_rows.size(), rest_cols.size())) <
          size_left - 1) {
        continue;
      }
      const double sub = detail::optimal_cost(submatrix(rest_rows, rest_cols));
      if (cost[r][c] + sub <= remaining + eps) {
        result.emplace_back(r, c);
        remaining -= cost[r][c];
        rows.erase(rows.begin());
        cols.erase(cols.begin() + static_cast<long>(cj));
        --size_left;
        fixed = true;
      }
    }
    if (!fixed) {
      // Row r is unmatched in every optimum of the required size.
      rows.erase(rows.begin());
    }
  }
  return result;
}

inline double assignment_cost(const CostMatrix& cost, const Assignment& a) {
  double total = 0.0;
  for (const auto& [r, c] : a) total += cost[r][c];
  return total;
}

}  // namespace egotrack
