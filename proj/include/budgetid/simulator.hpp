#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "budgetid/difficulty.hpp"
#include "budgetid/rng.hpp"
#include "budgetid/tasks.hpp"

namespace budgetid {

enum class AlgorithmKind { StaticProportions, Uniform, SuccessiveRejects, SuccessiveHalving };

const char* to_string(AlgorithmKind kind) noexcept;

class AlgorithmFamily {
 public:
  /// Tracks fixed proportions; the weights must be interior.
  static AlgorithmFamily static_proportions(Weights omega);
  static AlgorithmFamily uniform() { return AlgorithmFamily(AlgorithmKind::Uniform, std::nullopt); }
  static AlgorithmFamily successive_rejects() {
    return AlgorithmFamily(AlgorithmKind::SuccessiveRejects, std::nullopt);
  }
  static AlgorithmFamily successive_halving() {
    return AlgorithmFamily(AlgorithmKind::SuccessiveHalving, std::nullopt);
  }

  AlgorithmKind kind() const noexcept { return kind_; }
  const std::optional<Weights>& weights() const noexcept { return omega_; }

 private:
  AlgorithmFamily(AlgorithmKind kind, std::optional<Weights> omega)
      : kind_(kind), omega_(std::move(omega)) {}

  AlgorithmKind kind_;
  std::optional<Weights> omega_;
};

struct PullCounts {
  std::vector<std::uint64_t> N;
  std::uint64_t total() const noexcept;
};

struct RunOutcome {
  Answer answer;
  PullCounts pulls;
};

/// One run of the algorithm at budget T with the given generator.
RunOutcome run_once(const AlgorithmFamily& alg, const TaskSpec& task, const BanditInstance& instance,
                    std::size_t T, Philox4x32& rng);

struct SimResult {
  std::size_t T = 0;
  std::uint64_t replications = 0;
  std::uint64_t errors = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // Wilson 99%
  double ci_high = 0.0;
  std::optional<double> h_hat;      // T / log(1/p_hat); undefined for p_hat in {0, 1}
  bool pre_asymptotic = false;      // p_hat >= 1/2
  std::optional<double> ratio_hat;  // h_hat / H when H is supplied
  std::vector<double> mean_pull_fractions;

  double halfwidth() const noexcept { return 0.5 * (ci_high - ci_low); }
  bool operator==(const SimResult&) const = default;
};

/// Two-sided normal quantile for 99% coverage.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

/// Wilson score interval for `errors` successes out of `n` trials.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n, double z = kWilsonZ99);

struct SimOptions {
  unsigned workers = 0;           // 0 = hardware concurrency
  std::optional<double> H;        // reference difficulty for ratio_hat
};

/// Monte Carlo estimate of the error probability. Replication r draws from
/// stream (master_seed, r); the result does not depend on `workers`.
SimResult estimate_error(const AlgorithmFamily& alg, const TaskSpec& task,
                         const BanditInstance& instance, std::size_t T, std::uint64_t n_reps,
                         std::uint64_t master_seed, const SimOptions& options = {});

/// estimate_error at each budget of an increasing list.
std::vector<SimResult> rate_curve(const AlgorithmFamily& alg, const TaskSpec& task,
                                  const BanditInstance& instance, std::span<const std::size_t> budgets,
                                  std::uint64_t n_reps, std::uint64_t master_seed,
                                  const SimOptions& options = {});

struct SuccessiveRejectsSchedule {
  std::vector<std::uint64_t> n;          // cumulative n_k, k = 1..K-1
  std::vector<std::uint64_t> per_arm;    // pulls per surviving arm in phase k
  std::uint64_t remainder = 0;           // extra pulls, final phase, round-robin
};

/// n_k = ceil((T - K) / (logbar(K) (K + 1 - k))), logbar(K) = 1/2 + sum_{i=2}^K 1/i.
/// Requires T > K.
SuccessiveRejectsSchedule successive_rejects_schedule(std::size_t K, std::size_t T);

struct SuccessiveHalvingSchedule {
  std::vector<std::uint64_t> survivors;  // arms alive in each round
  std::vector<std::uint64_t> per_arm;    // pulls per arm in each round
  std::uint64_t remainder = 0;           // extra pulls, final round, round-robin
};

/// ceil(log2 K) rounds of floor(T / rounds) pulls split evenly over the
/// survivors; the top half (rounded up) survives. Requires T >= rounds * K.
SuccessiveHalvingSchedule successive_halving_schedule(std::size_t K, std::size_t T);

/// Deterministic pull sequence: at step t pull argmin_k (N_k - w_k (t + 1)),
/// lowest index on ties. Checks |N_k - w_k t| <= K at every prefix and
/// throws if that ever fails.
std::vector<std::uint32_t> tracking_sequence(const Weights& omega, std::size_t T);

}  // namespace budgetid
