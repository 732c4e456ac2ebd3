#include "sprelay/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sprelay {

ProfitMatrix::ProfitMatrix(std::size_t n, double fill)
    : n_(n), data_(n * n, fill) {}

ProfitMatrix::ProfitMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), data_(std::move(entries)) {
  if (data_.size() != n_ * n_)
    throw std::invalid_argument("ProfitMatrix: entry count is not n*n");
}

ProfitMatrix ProfitMatrix::from_rows(
    const std::vector<std::vector<double>>& rows) {
  const auto n = rows.size();
  ProfitMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n)
      throw std::invalid_argument("ProfitMatrix: matrix is not square");
    for (std::size_t c = 0; c < n; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Assignment solve_assignment(const ProfitMatrix& profits) {
  const std::size_t n = profits.size();
  if (n == 0) throw std::invalid_argument("solve_assignment: empty matrix");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (!std::isfinite(profits(r, c)))
        throw std::invalid_argument("solve_assignment: non-finite profit");

  // Minimize cost = -profit. Index 0 of the column arrays is a virtual column
  // used as the root of each augmenting path; rows and columns are 1-based here.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> col_match(n + 1, 0), way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    col_match[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = col_match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double slack = -profits(r0 - 1, c - 1) - row_pot[r0] - col_pot[c];
        if (slack < min_slack[c]) {
          min_slack[c] = slack;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          row_pot[col_match[c]] += delta;
          col_pot[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (col_match[col0] != 0);
    // Flip the augmenting path.
    do {
      const std::size_t col1 = way[col0];
      col_match[col0] = col_match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment out;
  out.permutation.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) out.permutation[col_match[c] - 1] = c - 1;
  for (std::size_t r = 0; r < n; ++r)
    out.total_profit += profits(r, out.permutation[r]);
  return out;
}

}  // namespace sprelay
