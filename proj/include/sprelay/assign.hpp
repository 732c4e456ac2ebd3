#pragma once

// Maximum-profit perfect matching on a square profit matrix.

#include <cstddef>
#include <vector>

namespace sprelay {

// Dense K x K matrix of finite profits, row-major. Row k is the first-slot
// subcarrier, column l the second-slot one.
class ProfitMatrix {
 public:
  explicit ProfitMatrix(std::size_t n, double fill = 0.0);
  ProfitMatrix(std::size_t n, std::vector<double> entries);
  static ProfitMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const { return n_; }
  double operator()(std::size_t row, std::size_t col) const {
    return data_[row * n_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return data_[row * n_ + col];
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<std::size_t> permutation;  // row k is matched to column permutation[k]
  double total_profit = 0.0;
};

/// Hungarian method (shortest augmenting paths with potentials), O(K^3).
/// Deterministic for a given input. Throws std::invalid_argument on an empty
/// matrix or non-finite entries.
Assignment solve_assignment(const ProfitMatrix& profits);

}  // namespace sprelay
