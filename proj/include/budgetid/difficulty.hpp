#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "budgetid/tasks.hpp"

namespace budgetid {

/// A point of the probability simplex.
class Weights {
 public:
  /// Entries must be nonnegative and sum to 1 within 1e-12.
  explicit Weights(std::vector<double> values);
  static Weights uniform(std::size_t arms);
  /// Divides a nonnegative, nonzero vector by its sum.
  static Weights normalized(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  double min() const noexcept;
  bool interior() const noexcept { return min() > 0.0; }

 private:
  std::vector<double> values_;
};

inline constexpr double kWeightSumTolerance = 1e-12;

enum class Method { ClosedForm, Optimizer, GridOracle };

const char* to_string(Method method) noexcept;

struct OptimizerDiagnostics {
  std::size_t iterations = 0;
  std::size_t cuts = 0;
  double upper = 0.0;  // value of the cutting-plane model
  double lower = 0.0;  // best exact value found
  double relative_gap = 0.0;
};

struct DifficultyResult {
  double H = 0.0;
  double inverse_rate = 0.0;
  Weights omega_star = Weights::uniform(1);
  std::vector<double> lambda_star;
  Method method = Method::ClosedForm;
  std::optional<double> x_star;  // two-arm closed forms only
  OptimizerDiagnostics diagnostics;
};

struct BestResponse {
  double value = 0.0;
  std::vector<double> lambda;  // minimizer, on the closure of Alt(mu)
};

/// inf over Alt(mu) of sum_k w_k KL(lambda_k, mu_k) with its minimizer.
/// Requires interior weights.
BestResponse best_response(const TaskSpec& task, const BanditInstance& instance, const Weights& omega);

/// Limit of h_{mu,T} for the static proportions algorithm with weights omega.
double sp_rate(const TaskSpec& task, const BanditInstance& instance, const Weights& omega);

struct OracleOptions {
  double min_weight = 0.0;      // restrict to min_k w_k >= min_weight
  bool force_optimizer = false; // skip closed forms
  double tolerance = 1e-9;      // relative gap between model and exact value
  std::size_t max_iterations = 20000;
};

/// Oracle static-proportions difficulty. Uses a closed form when one exists
/// (and no restriction is requested), otherwise a cutting-plane method whose
/// model is solved exactly as a matrix game.
DifficultyResult oracle_difficulty_sp(const TaskSpec& task, const BanditInstance& instance,
                                      const OracleOptions& options = {});

/// Two-arm best-arm closed form for arms of one exponential family.
DifficultyResult closed_form_expfam_bai_2(const BanditInstance& instance);

/// Two-arm Bernoulli closed form, written with log-odds.
DifficultyResult closed_form_bernoulli_bai(const BanditInstance& instance);

/// Gap-based difficulty of unit-variance Gaussian best-arm instances.
double h_delta(const BanditInstance& instance);

/// Brute-force max-min over an omega grid (compositions of `resolution`) and
/// a lambda grid, using only alternative-set membership. K <= 3.
/// Error is O(1/resolution) in the omega step plus the lambda grid step.
DifficultyResult grid_oracle(const TaskSpec& task, const BanditInstance& instance,
                             std::size_t resolution);

struct BallRestrictedResult {
  double value = 0.0;            // ((mu - eta)^T u)^2
  std::vector<double> witness;   // alternative inside the ball attaining it
  double witness_offset = 0.0;   // (witness - eta)^T u, zero up to rounding
  double witness_distance = 0.0; // ||witness - eta|| in the sigma^{-2} norm
  bool witness_in_ball = false;
};

/// Half-space difficulty restricted to the ball B(eta, r) (sigma^{-2} norm)
/// for Gaussian arms and ||u * sigma||_1 = 1. `instance` must lie in
/// B(eta, r / (sqrt(K) + 1)) with mu^T u < eta^T u.
BallRestrictedResult ball_restricted_difficulty(const BanditInstance& instance,
                                                std::span<const double> eta,
                                                std::span<const double> u, double radius);

namespace detail {

/// Best response that also accepts weights on the simplex boundary. Assumes
/// a validated instance.
BestResponse best_response_closure(const TaskSpec& task, const BanditInstance& instance,
                                   std::span<const double> omega);

/// Generic log1p usable with extended-precision types.
template <class Real>
Real log1p_any(const Real& a) {
  using std::abs;
  using std::log;
  if (abs(a) < Real(1e-4)) {
    Real term = a;
    Real sum = 0;
    for (int n = 1; n < 200; ++n) {
      const Real contrib = term / n;
      sum += (n % 2 == 1) ? contrib : Real(-contrib);
      if (abs(contrib) < abs(sum) * Real(1e-60)) break;
      term *= a;
    }
    return sum;
  }
  return log(Real(1) + a);
}

/// Bernoulli KL in any floating type.
template <class Real>
Real bernoulli_kl(const Real& x, const Real& y) {
  using std::log;
  if (x == 0) return -log1p_any<Real>(-y);
  if (x == 1) return -log(y);
  const Real first = x * log(x / y);
  // (1 - x) log((1 - x) / (1 - y)) = (1 - x) log1p((y - x) / (1 - y))
  const Real second = (Real(1) - x) * log1p_any<Real>((y - x) / (Real(1) - y));
  const Real value = first + second;
  return value > 0 ? value : Real(0);
}

template <class Real>
struct BernoulliTwoArm {
  Real x_star;
  Real inverse_rate;
  Real omega_1;
};

/// x* = log((1 - mu2)/(1 - mu1)) / log(mu1 (1 - mu2) / ((1 - mu1) mu2)),
/// inverse rate KL(x*, mu1), omega_1 = (logit x* - logit mu2) / (logit mu1 - logit mu2).
template <class Real>
BernoulliTwoArm<Real> bernoulli_bai_closed_form(const Real& mu1, const Real& mu2) {
  using std::log;
  const Real l1 = log1p_any<Real>(-mu1);
  const Real l2 = log1p_any<Real>(-mu2);
  const Real numerator = l2 - l1;
  const Real denominator = (log(mu1) - log(mu2)) + numerator;
  const Real x = numerator / denominator;
  const Real logit_x = log(x) - log1p_any<Real>(-x);
  const Real logit_2 = log(mu2) - l2;
  const Real omega_1 = (logit_x - logit_2) / denominator;
  return {x, bernoulli_kl<Real>(x, mu1), omega_1};
}

}  // namespace detail

}  // namespace budgetid
