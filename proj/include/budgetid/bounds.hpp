#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "budgetid/difficulty.hpp"

namespace budgetid {

/// Any difficulty H evaluated on a mean vector (same families as the base).
using DifficultyFn = std::function<double(const BanditInstance&)>;

struct Perturbation {
  std::size_t coordinate = 0;
  std::vector<double> lambda;  // equal to the base except at `coordinate`
};

/// Base instance with one-coordinate alternatives, one per coordinate.
struct CornerConstruction {
  TaskSpec task;
  BanditInstance base;
  std::vector<Perturbation> perturbed;
  DifficultyFn H;
};

struct RatioResult {
  double lower_bound = 0.0;
  std::optional<Weights> omega;
  std::vector<double> contributions;
};

/// H(lambda) sum_k w_k KL(mu_k, lambda_k) for the difficulty values.
struct FiniteTCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

/// Non-asymptotic inequality at budget T between an algorithm's behaviour
/// at mu (error probability, expected pull fractions) and its ratio at an
/// alternative lambda:
///   R(lambda)^{-1} (1 - p_mu) - log 2 / sqrt(T) <= H(lambda) sum_k E[N_k/T] KL(mu_k, lambda_k).
/// Requires H(lambda) <= sqrt(T) and i*(lambda) != i*(mu).
FiniteTCheck finite_T_check(const TaskSpec& task, const BanditInstance& mu,
                            std::span<const double> lambda, double H_lambda, std::size_t T,
                            std::span<const double> pull_fractions, double p_error_mu,
                            double ratio_lambda);

/// R_{H,T} = T / (log(1/p) H). Returns nullopt when p is 0 or 1.
std::optional<double> ratio_from_error(double p_error, std::size_t T, double H);

/// (max_w min_{lambda in D} H(lambda) sum_k w_k KL(mu_k, lambda_k))^{-1}.
/// `contributions` holds the per-lambda values at the maximizing w.
RatioResult limsup_ratio_lb(const TaskSpec& task, const BanditInstance& mu,
                            std::span<const std::vector<double>> alternatives,
                            std::span<const double> H_values);

/// sum_j 1 / (H(lambda^(j)) KL(mu_j, lambda^(j)_j)) with the equalizing weights.
RatioResult corner_lb(const CornerConstruction& construction);

/// Two-arm Bernoulli construction mu = (x(1+x), x), lambda^(1) = (x/2, x),
/// lambda^(2) = (x(1+x), 1/2) with H the oracle difficulty. Uses 50-digit
/// arithmetic below x = 1e-8. Valid for x in [1e-300, 0.366).
RatioResult bernoulli_two_arm_bound(double x);

/// Same bound evaluated in 50-digit arithmetic regardless of x.
RatioResult bernoulli_two_arm_bound_extended(double x);

/// Limits of the two contributions as x -> 0: {first term, second term}.
/// The first is the Poisson-limit value, the second is 1.
std::pair<double, double> bernoulli_two_arm_limits();

struct GaussianLogKResult {
  RatioResult ratio;         // against H_Delta
  double floor = 0.0;        // (1/8)(log(K+1) - log 2)
  double csp_bound = 0.0;    // ratio.lower_bound / 2, against the oracle difficulty
  double csp_floor = 0.0;    // (3/80) log K, floor for csp_bound
};

/// Unit-variance Gaussian construction mu_1 = 0, mu_k = -k Delta (k >= 2),
/// lambda^(j)_j = j Delta, with H = H_Delta.
GaussianLogKResult gaussian_bai_bound(std::size_t K, double delta);

/// Positivity construction: K arms of mean m > theta, each moved to ell < theta.
/// Bound K KL(theta, ell) / KL(m, ell).
RatioResult positivity_bound(const Family& family, std::size_t K, double m, double ell, double theta);

std::vector<RatioResult> positivity_sweep(const Family& family, std::size_t K, double m,
                                          double theta, std::span<const double> ells);

struct HalfSpaceSweepPoint {
  std::size_t level = 0;
  std::size_t alternatives = 0;
  RatioResult ratio;
};

/// Gaussian half-space instance near the boundary; at level L the set D has
/// one alternative per interior dyadic weight vector with denominator 2^L,
/// each the best response to that weight at distance `delta` across the
/// hyperplane. The sets are nested, so the bound is nondecreasing in L.
std::vector<HalfSpaceSweepPoint> half_space_boundary_sweep(const TaskSpec& task,
                                                           const BanditInstance& mu, double delta,
                                                           std::size_t max_level);

}  // namespace budgetid
