#include "epoa/matching.hpp"

#include <algorithm>
#include <limits>

#include "epoa/errors.hpp"

namespace epoa {

Matching max_weight_matching(const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = weights.size();
  const std::size_t cols = rows ? weights.front().size() : 0;
  Matching out;
  out.row_to_col.assign(rows, std::nullopt);
  if (rows == 0 || cols == 0) return out;

  double top = 0.0;
  for (const auto& row : weights) {
    if (row.size() != cols) throw DomainError("ragged weight matrix");
    for (double w : row) {
      if (!(w >= 0.0)) throw DomainError("weights must be non-negative");
      top = std::max(top, w);
    }
  }

  // Minimize cost = top - weight over the padded square matrix; padding
  // entries carry weight 0.
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t r, std::size_t c) {
    const double w = (r < rows && c < cols) ? weights[r][c] : 0.0;
    return top - w;
  };

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; col_match[c] is the row assigned to column c.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> col_match(n + 1, 0), way(n + 1, 0);
  for (std::size_t r = 1; r <= n; ++r) {
    col_match[0] = r;
    std::size_t c0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[c0] = true;
      const std::size_t r0 = col_match[c0];
      double delta = inf;
      std::size_t c1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (cur < min_slack[c]) {
          min_slack[c] = cur;
          way[c] = c0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          c1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[col_match[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      c0 = c1;
    } while (col_match[c0] != 0);
    do {
      const std::size_t c1 = way[c0];
      col_match[c0] = col_match[c1];
      c0 = c1;
    } while (c0 != 0);
  }

  for (std::size_t c = 1; c <= n; ++c) {
    const std::size_t r = col_match[c] - 1;
    if (r < rows && c - 1 < cols) {
      out.row_to_col[r] = c - 1;
      out.weight += weights[r][c - 1];
    }
  }
  return out;
}

}  // namespace epoa
