#pragma once

// Hand-rolled generators for property tests. Deterministic given the seed.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
  }

  /// Means whose pairwise gaps exceed min_gap.
  std::vector<double> separated(std::size_t K, double lo, double hi, double min_gap) {
    for (;;) {
      std::vector<double> v(K);
      for (auto& x : v) x = uniform(lo, hi);
      auto s = v;
      std::sort(s.begin(), s.end());
      bool ok = true;
      for (std::size_t i = 1; i < K; ++i) ok = ok && s[i] - s[i - 1] > min_gap;
      if (ok) return v;
    }
  }

  /// Means at least min_gap away from theta.
  std::vector<double> away_from(std::size_t K, double lo, double hi, double theta, double min_gap) {
    std::vector<double> v(K);
    for (auto& x : v) {
      do x = uniform(lo, hi);
      while (std::abs(x - theta) <= min_gap);
    }
    return v;
  }

  /// Point of the simplex with every entry >= floor.
  std::vector<double> simplex(std::size_t K, double floor = 0.0) {
    std::vector<double> e(K);
    double s = 0.0;
    for (auto& x : e) {
      x = std::exponential_distribution<double>(1.0)(eng_);
      s += x;
    }
    for (auto& x : e) x = floor + (1.0 - K * floor) * x / s;
    double t = 0.0;
    for (std::size_t k = 0; k + 1 < K; ++k) t += e[k];
    e[K - 1] = 1.0 - t;
    return e;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oracle
