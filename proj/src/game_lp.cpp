#include "budgetid/game_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "budgetid/error.hpp"

namespace budgetid {

void PayoffMatrix::add_row(std::span<const double> row) {
  if (row.size() != cols_) {
    fail(ErrorKind::InvalidInput, "payoff row has the wrong length");
  }
  for (double v : row) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "payoff entries must be finite");
  }
  data_.insert(data_.end(), row.begin(), row.end());
}

namespace {

constexpr double kPivotTol = 1e-13;

// Tableau for  max 1^T y  s.t.  A^T y + s = 1.  Rows: the K constraints.
// Columns: m structural variables y, then K slacks, then the right-hand side.
class Tableau {
 public:
  Tableau(const PayoffMatrix& a, double scale, double shift)
      : K_(a.cols()), m_(a.rows()), width_(m_ + K_ + 1), cells_(K_ * width_, 0.0),
        objective_(width_, 0.0), basis_(K_) {
    for (std::size_t k = 0; k < K_; ++k) {
      for (std::size_t i = 0; i < m_; ++i) at(k, i) = a(i, k) * scale + shift;
      at(k, m_ + k) = 1.0;
      at(k, width_ - 1) = 1.0;
      basis_[k] = m_ + k;
    }
    // Objective row holds reduced costs of  -1^T y.
    for (std::size_t i = 0; i < m_; ++i) objective_[i] = -1.0;
  }

  std::size_t solve(std::size_t max_pivots) {
    std::size_t pivots = 0;
    std::size_t stalled = 0;
    bool bland = false;
    while (true) {
      const std::size_t enter = entering(bland);
      if (enter == npos) return pivots;
      const std::size_t leave = leaving(enter);
      if (leave == npos) {
        fail(ErrorKind::OptimizerFailure, "matrix game LP is unbounded (payoff row of zeros?)");
      }
      const double before = objective_[width_ - 1];
      pivot(leave, enter);
      if (++pivots > max_pivots) {
        fail(ErrorKind::OptimizerFailure, "matrix game LP exceeded its pivot budget");
      }
      if (objective_[width_ - 1] <= before) {
        if (++stalled > K_ + 8) bland = true;
      } else {
        stalled = 0;
      }
    }
  }

  double optimum() const noexcept { return objective_[width_ - 1]; }
  double price(std::size_t k) const noexcept { return objective_[m_ + k]; }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  double& at(std::size_t r, std::size_t c) noexcept { return cells_[r * width_ + c]; }

  std::size_t entering(bool bland) const noexcept {
    std::size_t best = npos;
    double most = -kPivotTol;
    for (std::size_t c = 0; c + 1 < width_; ++c) {
      if (objective_[c] < most) {
        best = c;
        if (bland) break;
        most = objective_[c];
      }
    }
    return best;
  }

  std::size_t leaving(std::size_t enter) noexcept {
    std::size_t best = npos;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < K_; ++r) {
      const double a = at(r, enter);
      if (a <= kPivotTol) continue;
      const double q = at(r, width_ - 1) / a;
      if (q < ratio || (q == ratio && basis_[r] < basis_[best])) {
        ratio = q;
        best = r;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t c) noexcept {
    const double p = at(r, c);
    for (std::size_t j = 0; j < width_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < K_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = objective_[c];
    for (std::size_t j = 0; j < width_; ++j) objective_[j] -= f * at(r, j);
    objective_[c] = 0.0;
    basis_[r] = c;
  }

  std::size_t K_;
  std::size_t m_;
  std::size_t width_;
  std::vector<double> cells_;
  std::vector<double> objective_;
  std::vector<std::size_t> basis_;
};

}  // namespace

GameSolution solve_maximin(const PayoffMatrix& payoff) {
  const std::size_t K = payoff.cols();
  const std::size_t m = payoff.rows();
  if (K == 0 || m == 0) {
    fail(ErrorKind::InvalidInput, "matrix game needs at least one row and one column");
  }

  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  bool zero_row = false;
  for (std::size_t i = 0; i < m; ++i) {
    double row_max = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      largest = std::max(largest, std::abs(payoff(i, k)));
      smallest = std::min(smallest, payoff(i, k));
      row_max = std::max(row_max, payoff(i, k));
    }
    zero_row = zero_row || row_max <= 0.0;
  }
  if (largest == 0.0) {
    return {std::vector<double>(K, 1.0 / static_cast<double>(K)), 0.0, 0};
  }

  // Nonnegative payoffs without an all-zero row already have a positive
  // value; anything else is shifted so every entry is at least 1.
  const double scale = 1.0 / largest;
  const double shift = (smallest >= 0.0 && !zero_row) ? 0.0 : 1.0 - smallest * scale;

  Tableau tableau(payoff, scale, shift);
  GameSolution solution;
  solution.pivots = tableau.solve(50 * (m + K) + 1000);

  double total = 0.0;
  solution.weights.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    solution.weights[k] = std::max(tableau.price(k), 0.0);
    total += solution.weights[k];
  }
  if (!(total > 0.0)) {
    fail(ErrorKind::OptimizerFailure, "matrix game LP returned no dual prices");
  }
  for (double& w : solution.weights) w /= total;

  // Evaluate the value directly at the returned mixture; this is the exact
  // game value up to rounding and avoids the cancellation in 1/opt - shift.
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += payoff(i, k) * solution.weights[k];
    value = std::min(value, s);
  }
  solution.value = value;
  return solution;
}

}  // namespace budgetid
