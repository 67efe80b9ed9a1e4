#pragma once

// Brute 1-D minimization: dense scan followed by golden-section refinement of
// the best bracket. Used for best responses and two-arm maximin values
// without touching the library's own solvers.

#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

inline std::pair<double, double> minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                                             int scan = 2000) {
  double best_x = lo;
  double best_f = f(lo);
  for (int i = 1; i <= scan; ++i) {
    const double x = lo + (hi - lo) * i / scan;
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
  }
  const double step = (hi - lo) / scan;
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) < f(d)) b = d;
    else a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  const double x = 0.5 * (a + b);
  const double v = f(x);
  return v < best_f ? std::pair{x, v} : std::pair{best_x, best_f};
}

inline std::pair<double, double> maximize_1d(const std::function<double(double)>& f, double lo, double hi,
                                             int scan = 2000) {
  auto [x, v] = minimize_1d([&](double t) { return -f(t); }, lo, hi, scan);
  return {x, -v};
}

inline double bernoulli_kl(double x, double y) {
  auto term = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); };
  return term(x, y) + term(1.0 - x, 1.0 - y);
}

inline double gaussian_kl(double x, double y, double var) { return (x - y) * (x - y) / (2.0 * var); }

}  // namespace oracle
