#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace budgetid {

/// Row-major m x K payoff matrix.
class PayoffMatrix {
 public:
  explicit PayoffMatrix(std::size_t cols) : cols_(cols) {}

  void add_row(std::span<const double> row);
  std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t k) const noexcept { return data_[i * cols_ + k]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

 private:
  std::size_t cols_;
  std::vector<double> data_;
};

struct GameSolution {
  std::vector<double> weights;  // maximizing mixture over the columns
  double value = 0.0;           // max_w min_i (row_i . w)
  std::size_t pivots = 0;
};

/// Solves max_{w in simplex} min_i sum_k A(i, k) w_k exactly by dense simplex
/// on the dual LP  max 1^T y  s.t.  A^T y <= 1, y >= 0  (after shifting A so
/// the game value is positive). The weights are read off the dual prices.
/// Throws OptimizerFailure if the pivot budget runs out.
GameSolution solve_maximin(const PayoffMatrix& payoff);

}  // namespace budgetid
