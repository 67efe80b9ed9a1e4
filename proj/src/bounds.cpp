#include "budgetid/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "budgetid/game_lp.hpp"

namespace budgetid {

namespace {

using Extended = boost::multiprecision::cpp_bin_float_50;

constexpr double kExtendedBelow = 1e-8;
constexpr double kSmallestX = 1e-300;

void require_alternative(const TaskSpec& task, const BanditInstance& mu,
                         std::span<const double> lambda, ErrorKind kind) {
  if (lambda.size() != mu.size()) fail(kind, "alternative has the wrong number of arms");
  bool alternative = false;
  try {
    alternative = is_alternative(task, mu, lambda);
  } catch (const Error& e) {
    fail(kind, std::string("alternative is not a valid instance: ") + e.what());
  }
  if (!alternative) fail(kind, "candidate has the same correct answer as the base instance");
}

template <class Real>
RatioResult bernoulli_two_arm_terms(const Real& x) {
  const Real mu1 = x * (Real(1) + x);
  const Real half = Real(1) / 2;
  // lambda^(1) = (x/2, x): arm 2 is best. lambda^(2) = (x(1+x), 1/2): arm 2 is best.
  const auto first = detail::bernoulli_bai_closed_form<Real>(x, x / 2);
  const auto second = detail::bernoulli_bai_closed_form<Real>(half, mu1);
  const Real t1 = first.inverse_rate / detail::bernoulli_kl<Real>(mu1, x / 2);
  const Real t2 = second.inverse_rate / detail::bernoulli_kl<Real>(x, half);
  RatioResult r;
  r.contributions = {static_cast<double>(t1), static_cast<double>(t2)};
  r.lower_bound = static_cast<double>(t1 + t2);
  r.omega = Weights::normalized({static_cast<double>(t1), static_cast<double>(t2)});
  return r;
}

void require_bernoulli_x(double x) {
  if (!(x >= kSmallestX && x < 0.5)) {
    std::ostringstream os;
    os << "x = " << x << " is outside [1e-300, 1/2)";
    fail(ErrorKind::InvalidInput, os.str());
  }
}

}  // namespace

std::optional<double> ratio_from_error(double p_error, std::size_t T, double H) {
  if (!(p_error > 0.0 && p_error < 1.0)) return std::nullopt;
  return static_cast<double>(T) / (-std::log(p_error) * H);
}

FiniteTCheck finite_T_check(const TaskSpec& task, const BanditInstance& mu,
                            std::span<const double> lambda, double H_lambda, std::size_t T,
                            std::span<const double> pull_fractions, double p_error_mu,
                            double ratio_lambda) {
  if (T == 0) fail(ErrorKind::InvalidParameter, "budget T must be positive");
  const double root = std::sqrt(static_cast<double>(T));
  if (!(H_lambda > 0.0) || H_lambda > root) {
    fail(ErrorKind::Precondition, "the finite-budget inequality needs 0 < H(lambda) <= sqrt(T)");
  }
  if (!(ratio_lambda > 0.0)) fail(ErrorKind::InvalidParameter, "ratio at lambda must be positive");
  if (!(p_error_mu >= 0.0 && p_error_mu <= 1.0)) {
    fail(ErrorKind::InvalidParameter, "error probability must lie in [0, 1]");
  }
  if (pull_fractions.size() != mu.size()) {
    fail(ErrorKind::InvalidInput, "one pull fraction per arm is required");
  }
  require_alternative(task, mu, lambda, ErrorKind::InvalidInput);

  FiniteTCheck out;
  out.lhs = (1.0 - p_error_mu) / ratio_lambda - std::numbers::ln2 / root;
  double sum = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    sum += pull_fractions[k] * kl(mu.family(k), mu.mean(k), lambda[k]);
  }
  out.rhs = H_lambda * sum;
  out.satisfied = out.lhs <= out.rhs;
  return out;
}

RatioResult limsup_ratio_lb(const TaskSpec& task, const BanditInstance& mu,
                            std::span<const std::vector<double>> alternatives,
                            std::span<const double> H_values) {
  if (alternatives.empty()) fail(ErrorKind::InvalidInput, "alternative set D is empty");
  if (alternatives.size() != H_values.size()) {
    fail(ErrorKind::InvalidInput, "one difficulty value per alternative is required");
  }
  const std::size_t K = mu.size();
  PayoffMatrix payoff(K);
  std::vector<double> row(K);
  for (std::size_t j = 0; j < alternatives.size(); ++j) {
    require_alternative(task, mu, alternatives[j], ErrorKind::InvalidInput);
    if (!(H_values[j] > 0.0) || !std::isfinite(H_values[j])) {
      fail(ErrorKind::InvalidInput, "difficulty values must be positive and finite");
    }
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = H_values[j] * kl(mu.family(k), mu.mean(k), alternatives[j][k]);
    }
    payoff.add_row(row);
  }
  const GameSolution game = solve_maximin(payoff);
  if (!(game.value > 0.0)) fail(ErrorKind::OptimizerFailure, "max-min value is not positive");

  RatioResult out;
  out.lower_bound = 1.0 / game.value;
  out.omega = Weights::normalized(game.weights);
  out.contributions.resize(payoff.rows());
  for (std::size_t j = 0; j < payoff.rows(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += payoff(j, k) * game.weights[k];
    out.contributions[j] = s;
  }
  return out;
}

RatioResult corner_lb(const CornerConstruction& c) {
  const std::size_t K = c.base.size();
  if (c.perturbed.empty()) fail(ErrorKind::InvalidConstruction, "construction has no perturbations");
  if (!c.H) fail(ErrorKind::InvalidConstruction, "construction has no difficulty evaluator");
  std::vector<bool> seen(K, false);
  std::vector<double> omega(K, 0.0);
  RatioResult out;
  for (const auto& p : c.perturbed) {
    if (p.coordinate >= K || p.lambda.size() != K) {
      fail(ErrorKind::InvalidConstruction, "perturbation does not match the base instance");
    }
    if (seen[p.coordinate]) {
      fail(ErrorKind::InvalidConstruction, "two perturbations share a coordinate");
    }
    seen[p.coordinate] = true;
    for (std::size_t k = 0; k < K; ++k) {
      if (k != p.coordinate && p.lambda[k] != c.base.mean(k)) {
        fail(ErrorKind::InvalidConstruction, "perturbation changes more than one coordinate");
      }
    }
    require_alternative(c.task, c.base, p.lambda, ErrorKind::InvalidConstruction);
    const double H = c.H(c.base.with_means(p.lambda));
    if (!(H > 0.0) || !std::isfinite(H)) {
      fail(ErrorKind::InvalidConstruction, "difficulty of a perturbed instance is not positive");
    }
    const std::size_t j = p.coordinate;
    const double term = 1.0 / (H * kl(c.base.family(j), c.base.mean(j), p.lambda[j]));
    out.contributions.push_back(term);
    out.lower_bound += term;
    omega[j] = term;
  }
  out.omega = Weights::normalized(std::move(omega));
  return out;
}

RatioResult bernoulli_two_arm_bound(double x) {
  require_bernoulli_x(x);
  if (x < kExtendedBelow) return bernoulli_two_arm_bound_extended(x);

  const Family f = Family::bernoulli();
  CornerConstruction c{TaskSpec::best_arm(),
                       BanditInstance(f, {x * (1.0 + x), x}),
                       {{0, {x / 2.0, x}}, {1, {x * (1.0 + x), 0.5}}},
                       [](const BanditInstance& lambda) { return closed_form_bernoulli_bai(lambda).H; }};
  return corner_lb(c);
}

RatioResult bernoulli_two_arm_bound_extended(double x) {
  require_bernoulli_x(x);
  if (x * (1.0 + x) >= 0.5) {
    fail(ErrorKind::InvalidConstruction, "lambda^(2) is not an alternative for this x");
  }
  return bernoulli_two_arm_terms<Extended>(Extended(x));
}

std::pair<double, double> bernoulli_two_arm_limits() {
  const double l2 = std::numbers::ln2;
  const double first = (1.0 - 1.0 / (2.0 * l2) - std::log(2.0 * l2) / (2.0 * l2)) / (l2 - 0.5);
  return {first, 1.0};
}

GaussianLogKResult gaussian_bai_bound(std::size_t K, double delta) {
  if (K < 2) fail(ErrorKind::InvalidInput, "the log K construction needs K >= 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) fail(ErrorKind::InvalidInput, "Delta must be positive");

  // tail[n] = sum_{m >= n}^{2K} 1/m^2, so sums over j+2..j+K are differences.
  std::vector<double> tail(2 * K + 2, 0.0);
  for (std::size_t m = 2 * K; m >= 1; --m) {
    tail[m] = tail[m + 1] + 1.0 / (static_cast<double>(m) * static_cast<double>(m));
  }
  const double d2 = delta * delta;
  GaussianLogKResult out;
  std::vector<double> omega(K, 0.0);
  for (std::size_t j = 2; j <= K; ++j) {
    const double jd = static_cast<double>(j);
    // In lambda^(j) arm j is best at j Delta; gaps j Delta to arm 1, (j+k) Delta to arm k.
    const double others = tail[j + 2] - tail[j + K + 1] - 1.0 / ((2.0 * jd) * (2.0 * jd));
    const double H = (4.0 / (jd * jd) + 2.0 * others) / d2;
    const double kl_j = 2.0 * jd * jd * d2;  // (2 j Delta)^2 / 2
    const double term = 1.0 / (H * kl_j);
    out.ratio.contributions.push_back(term);
    out.ratio.lower_bound += term;
    omega[j - 1] = term;
  }
  out.ratio.omega = Weights::normalized(std::move(omega));
  const double Kd = static_cast<double>(K);
  out.floor = (std::log(Kd + 1.0) - std::numbers::ln2) / 8.0;
  out.csp_bound = out.ratio.lower_bound / 2.0;
  out.csp_floor = 3.0 / 80.0 * std::log(Kd);
  return out;
}

RatioResult positivity_bound(const Family& family, std::size_t K, double m, double ell, double theta) {
  if (K == 0) fail(ErrorKind::InvalidInput, "K must be positive");
  if (!(ell < theta && theta < m)) fail(ErrorKind::InvalidInput, "need ell < theta < m");
  if (!family.in_mean_domain(ell) || !family.in_mean_domain(m) || !family.in_mean_domain(theta)) {
    fail(ErrorKind::InvalidInput, "ell, theta and m must lie in the mean domain");
  }
  if (K == 1) {
    RatioResult r;
    const double term = kl(family, theta, ell) / kl(family, m, ell);
    r.lower_bound = term;
    r.contributions = {term};
    r.omega = Weights::uniform(1);
    return r;
  }
  CornerConstruction c{TaskSpec::positivity(theta), BanditInstance(family, std::vector<double>(K, m)),
                       {}, [theta](const BanditInstance& lambda) {
                         return oracle_difficulty_sp(TaskSpec::positivity(theta), lambda).H;
                       }};
  for (std::size_t j = 0; j < K; ++j) {
    std::vector<double> lambda(K, m);
    lambda[j] = ell;
    c.perturbed.push_back({j, std::move(lambda)});
  }
  return corner_lb(c);
}

std::vector<RatioResult> positivity_sweep(const Family& family, std::size_t K, double m, double theta,
                                          std::span<const double> ells) {
  std::vector<RatioResult> out;
  out.reserve(ells.size());
  for (double ell : ells) out.push_back(positivity_bound(family, K, m, ell, theta));
  return out;
}

std::vector<HalfSpaceSweepPoint> half_space_boundary_sweep(const TaskSpec& task,
                                                           const BanditInstance& mu, double delta,
                                                           std::size_t max_level) {
  if (task.kind() != TaskKind::HalfSpace) fail(ErrorKind::InvalidInput, "task must be a half-space");
  if (!mu.all_gaussian()) fail(ErrorKind::Unsupported, "half-space sweep needs Gaussian arms");
  if (!(delta > 0.0)) fail(ErrorKind::InvalidParameter, "delta must be positive");
  const std::size_t K = mu.size();
  if (max_level == 0 || max_level > 20) fail(ErrorKind::InvalidParameter, "level must be in [1, 20]");

  const auto u = task.normal();
  double margin = -task.offset();
  for (std::size_t k = 0; k < K; ++k) margin += mu.mean(k) * u[k];
  const double side = margin > 0.0 ? 1.0 : -1.0;
  // Every alternative sits at offset -side * delta, so all share one difficulty.
  std::vector<double> far(mu.means().begin(), mu.means().end());
  double unorm = 0.0;
  for (std::size_t k = 0; k < K; ++k) unorm += u[k] * u[k];
  for (std::size_t k = 0; k < K; ++k) far[k] -= (margin + side * delta) * u[k] / unorm;
  const double H = oracle_difficulty_sp(task, mu.with_means(std::move(far))).H;

  std::vector<std::vector<double>> alternatives;
  std::vector<double> H_values;
  std::vector<HalfSpaceSweepPoint> out;
  std::vector<std::size_t> parts(K);
  for (std::size_t level = 1; level <= max_level; ++level) {
    const std::size_t n = std::size_t{1} << level;
    // Compositions of n into K positive parts that are new at this level
    // (at least one part odd); earlier levels already hold the rest.
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t k, std::size_t left) {
      if (k + 1 == K) {
        if (left == 0) return;
        parts[k] = left;
        const bool fresh = level == 1 || std::any_of(parts.begin(), parts.end(),
                                                      [](std::size_t p) { return p % 2 == 1; });
        if (!fresh) return;
        double spread = 0.0;
        std::vector<double> w(K);
        for (std::size_t i = 0; i < K; ++i) {
          w[i] = static_cast<double>(parts[i]) / static_cast<double>(n);
          spread += u[i] * u[i] * mu.family(i).variance() / w[i];
        }
        std::vector<double> lambda(mu.means().begin(), mu.means().end());
        for (std::size_t i = 0; i < K; ++i) {
          lambda[i] -= (margin + side * delta) * (u[i] * mu.family(i).variance() / w[i]) / spread;
        }
        alternatives.push_back(std::move(lambda));
        H_values.push_back(H);
        return;
      }
      for (std::size_t p = 1; p + (K - k - 1) <= left; ++p) {
        parts[k] = p;
        walk(k + 1, left - p);
      }
    };
    walk(0, n);
    out.push_back({level, alternatives.size(), limsup_ratio_lb(task, mu, alternatives, H_values)});
  }
  return out;
}

}  // namespace budgetid
