#include "budgetid/exp_family.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace budgetid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " " << value;
  return os.str();
}

void require_bernoulli_interior(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    fail(ErrorKind::InvalidParameter, describe(name, x) + " is outside the Bernoulli mean domain (0, 1)");
  }
}

}  // namespace

const char* to_string(FamilyKind kind) noexcept {
  return kind == FamilyKind::Gaussian ? "gaussian" : "bernoulli";
}

Family Family::gaussian(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    fail(ErrorKind::InvalidParameter, describe("Gaussian variance", variance) + " must be positive");
  }
  return Family(FamilyKind::Gaussian, variance);
}

double Family::mean_lower() const noexcept { return is_bernoulli() ? 0.0 : -kInf; }
double Family::mean_upper() const noexcept { return is_bernoulli() ? 1.0 : kInf; }

bool Family::in_mean_domain(double x) const noexcept {
  if (is_bernoulli()) return x > 0.0 && x < 1.0;
  return std::isfinite(x);
}

bool Family::in_mean_closure(double x) const noexcept {
  if (is_bernoulli()) return x >= 0.0 && x <= 1.0;
  return std::isfinite(x);
}

double kl(const Family& family, double x, double y) {
  if (family.is_gaussian()) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      fail(ErrorKind::InvalidParameter, "Gaussian KL needs finite means");
    }
    const double d = x - y;
    return d * d / (2.0 * family.variance());
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    fail(ErrorKind::InvalidParameter, describe("Bernoulli KL first argument", x) + " is outside [0, 1]");
  }
  require_bernoulli_interior(y, "Bernoulli KL second argument");
  return detail::bernoulli_kl_unchecked(x, y);
}

double natural_of_mean(const Family& family, double x) {
  if (family.is_gaussian()) {
    return x / family.variance();
  }
  require_bernoulli_interior(x, "mean");
  return std::log(x) - std::log1p(-x);
}

double mean_of_natural(const Family& family, double xi) {
  if (family.is_gaussian()) {
    return xi * family.variance();
  }
  // Logistic map; the result is kept strictly inside (0, 1).
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  const double mean = xi >= 0.0 ? 1.0 / (1.0 + std::exp(-xi)) : std::exp(xi) / (1.0 + std::exp(xi));
  return std::clamp(mean, kLow, kHigh);
}

double phi(const Family& family, double xi) {
  if (family.is_gaussian()) {
    return 0.5 * family.variance() * xi * xi;
  }
  return xi > 0.0 ? xi + std::log1p(std::exp(-xi)) : std::log1p(std::exp(xi));
}

double phi_prime(const Family& family, double xi) { return mean_of_natural(family, xi); }

double phi_prime_inv(const Family& family, double x) { return natural_of_mean(family, x); }

double bregman(const Family& family, double a, double b) {
  if (family.is_gaussian()) {
    const double d = a - b;
    return 0.5 * family.variance() * d * d;
  }
  const double value = phi(family, a) - phi(family, b) - (a - b) * phi_prime(family, b);
  return value > 0.0 ? value : 0.0;
}

}  // namespace budgetid
