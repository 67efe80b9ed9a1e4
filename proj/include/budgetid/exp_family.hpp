#pragma once

#include <cmath>
#include <numbers>

#include "budgetid/error.hpp"

namespace budgetid {

enum class FamilyKind { Gaussian, Bernoulli };

/// One-parameter canonical exponential family, identified by its mean.
///
/// Gaussian arms have a known variance and mean domain (-inf, +inf).
/// Bernoulli arms have mean domain (0, 1); empirical means may reach the
/// closure [0, 1].
class Family {
 public:
  static Family gaussian(double variance = 1.0);
  static Family bernoulli() noexcept { return Family(FamilyKind::Bernoulli, 0.0); }

  FamilyKind kind() const noexcept { return kind_; }
  bool is_gaussian() const noexcept { return kind_ == FamilyKind::Gaussian; }
  bool is_bernoulli() const noexcept { return kind_ == FamilyKind::Bernoulli; }

  /// Gaussian variance. Zero for Bernoulli, which has no free scale.
  double variance() const noexcept { return variance_; }
  double stddev() const noexcept { return std::sqrt(variance_); }

  double mean_lower() const noexcept;
  double mean_upper() const noexcept;
  bool in_mean_domain(double x) const noexcept;
  bool in_mean_closure(double x) const noexcept;

  bool operator==(const Family&) const = default;

 private:
  Family(FamilyKind kind, double variance) noexcept : kind_(kind), variance_(variance) {}

  FamilyKind kind_;
  double variance_;
};

const char* to_string(FamilyKind kind) noexcept;

/// KL divergence between the members of `family` with means x and y.
/// x may lie on the closure of the mean domain (0 log 0 = 0), y must be interior.
double kl(const Family& family, double x, double y);

/// Natural parameter xi = phi'^{-1}(x).
double natural_of_mean(const Family& family, double x);
/// Mean phi'(xi).
double mean_of_natural(const Family& family, double xi);

/// Log-partition function and its derivative.
double phi(const Family& family, double xi);
double phi_prime(const Family& family, double xi);
double phi_prime_inv(const Family& family, double x);

/// Bregman divergence of phi: d(a, b) = phi(a) - phi(b) - (a - b) phi'(b).
/// Satisfies KL(mu_1, mu_2) = d(xi_2, xi_1).
double bregman(const Family& family, double a, double b);

/// One observation from the arm with the given mean. Bernoulli draws use one
/// 64-bit word, Gaussian draws two (Box-Muller, cosine branch only), so the
/// stream consumption per sample is fixed.
template <class Engine>
double sample(const Family& family, double mean, Engine& engine) {
  if (family.is_bernoulli()) {
    return engine.uniform01() < mean ? 1.0 : 0.0;
  }
  const double u1 = engine.uniform01_open_low();
  const double u2 = engine.uniform01();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + family.stddev() * z;
}

namespace detail {

/// log1p(a) - a without cancellation for small |a|.
inline double log1p_minus_identity(double a) {
  if (std::abs(a) < 1e-2) {
    // -a^2/2 + a^3/3 - a^4/4 + ...
    double term = a * a;
    double sum = 0.0;
    for (int n = 2; n < 40; ++n) {
      const double contrib = ((n % 2 == 0) ? -term : term) / n;
      sum += contrib;
      if (std::abs(contrib) <= 1e-18 * std::abs(sum)) break;
      term *= a;
    }
    return sum;
  }
  return std::log1p(a) - a;
}

/// Bernoulli KL with relative accuracy preserved when x is close to y.
inline double bernoulli_kl_unchecked(double x, double y) {
  if (x == 0.0) return -std::log1p(-y);
  if (x == 1.0) return -std::log(y);
  if (x == y) return 0.0;
  const double diff = x - y;
  const double a = diff / y;            // x / y - 1
  const double b = -diff / (1.0 - y);   // (1 - x) / (1 - y) - 1
  const double quadratic = diff * diff / (y * (1.0 - y));
  const double value =
      x * log1p_minus_identity(a) + (1.0 - x) * log1p_minus_identity(b) + quadratic;
  return value > 0.0 ? value : 0.0;
}

}  // namespace detail

}  // namespace budgetid
