#include "budgetid/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace budgetid {

namespace {

// Everything about a run that does not depend on the observations.
struct Plan {
  AlgorithmKind kind;
  std::size_t T;
  std::vector<std::uint32_t> sequence;  // static proportions and uniform
  SuccessiveRejectsSchedule sr;
  SuccessiveHalvingSchedule sh;
};

Plan make_plan(const AlgorithmFamily& alg, const TaskSpec& task, const BanditInstance& instance,
               std::size_t T) {
  const std::size_t K = instance.size();
  if (T < K) fail(ErrorKind::InvalidParameter, "budget T must be at least K");
  (void)correct_answer(task, instance);  // rejects degenerate instances
  Plan plan{alg.kind(), T, {}, {}, {}};
  switch (alg.kind()) {
    case AlgorithmKind::StaticProportions:
      if (alg.weights()->size() != K) {
        fail(ErrorKind::InvalidInput, "static proportions weights do not match the number of arms");
      }
      plan.sequence = tracking_sequence(*alg.weights(), T);
      break;
    case AlgorithmKind::Uniform:
      plan.sequence = tracking_sequence(Weights::uniform(K), T);
      break;
    case AlgorithmKind::SuccessiveRejects:
    case AlgorithmKind::SuccessiveHalving:
      if (task.kind() != TaskKind::BestArm) {
        fail(ErrorKind::Unsupported, std::string(to_string(alg.kind())) + " only solves best-arm identification");
      }
      if (alg.kind() == AlgorithmKind::SuccessiveRejects) {
        plan.sr = successive_rejects_schedule(K, T);
      } else {
        plan.sh = successive_halving_schedule(K, T);
      }
      break;
  }
  return plan;
}

class ArmStats {
 public:
  explicit ArmStats(const BanditInstance& instance)
      : instance_(instance), sum_(instance.size(), 0.0), count_(instance.size(), 0) {}

  void pull(std::size_t k, Philox4x32& rng) {
    sum_[k] += sample(instance_.family(k), instance_.mean(k), rng);
    ++count_[k];
  }

  // An arm that was never pulled reads as the lower end of its mean domain.
  double mean(std::size_t k) const {
    if (count_[k] == 0) return instance_.family(k).mean_lower();
    return sum_[k] / static_cast<double>(count_[k]);
  }

  std::vector<double> means() const {
    std::vector<double> m(sum_.size());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = mean(k);
    return m;
  }

  const std::vector<std::uint64_t>& counts() const noexcept { return count_; }

 private:
  const BanditInstance& instance_;
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
};

// Survivors ranked by (empirical mean descending, index ascending).
void rank(std::vector<std::size_t>& alive, const ArmStats& stats) {
  std::vector<double> m(alive.size());
  for (std::size_t i = 0; i < alive.size(); ++i) m[i] = stats.mean(alive[i]);
  std::vector<std::size_t> order(alive.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m[a] > m[b] || (m[a] == m[b] && alive[a] < alive[b]);
  });
  std::vector<std::size_t> ranked(alive.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranked[i] = alive[order[i]];
  alive = std::move(ranked);
}

void pull_round_robin(std::vector<std::size_t>& alive, std::uint64_t per_arm, std::uint64_t extra,
                      ArmStats& stats, Philox4x32& rng) {
  std::sort(alive.begin(), alive.end());
  for (std::uint64_t r = 0; r < per_arm; ++r) {
    for (std::size_t k : alive) stats.pull(k, rng);
  }
  for (std::uint64_t r = 0; r < extra; ++r) stats.pull(alive[r % alive.size()], rng);
}

RunOutcome execute(const Plan& plan, const TaskSpec& task, const BanditInstance& instance,
                   Philox4x32& rng) {
  const std::size_t K = instance.size();
  ArmStats stats(instance);
  RunOutcome out;
  switch (plan.kind) {
    case AlgorithmKind::StaticProportions:
    case AlgorithmKind::Uniform: {
      for (std::uint32_t k : plan.sequence) stats.pull(k, rng);
      out.answer = empirical_answer(task, stats.means());
      break;
    }
    case AlgorithmKind::SuccessiveRejects: {
      std::vector<std::size_t> alive(K);
      for (std::size_t k = 0; k < K; ++k) alive[k] = k;
      const std::size_t phases = plan.sr.per_arm.size();
      for (std::size_t p = 0; p < phases; ++p) {
        const std::uint64_t extra = p + 1 == phases ? plan.sr.remainder : 0;
        pull_round_robin(alive, plan.sr.per_arm[p], extra, stats, rng);
        rank(alive, stats);
        alive.pop_back();
      }
      out.answer.task = TaskKind::BestArm;
      out.answer.arm = alive.front();
      break;
    }
    case AlgorithmKind::SuccessiveHalving: {
      std::vector<std::size_t> alive(K);
      for (std::size_t k = 0; k < K; ++k) alive[k] = k;
      const std::size_t rounds = plan.sh.per_arm.size();
      for (std::size_t r = 0; r < rounds; ++r) {
        const std::uint64_t extra = r + 1 == rounds ? plan.sh.remainder : 0;
        pull_round_robin(alive, plan.sh.per_arm[r], extra, stats, rng);
        rank(alive, stats);
        alive.resize((alive.size() + 1) / 2);
      }
      out.answer.task = TaskKind::BestArm;
      out.answer.arm = alive.front();
      break;
    }
  }
  out.pulls.N = stats.counts();
  return out;
}

struct Tally {
  std::uint64_t errors = 0;
  std::vector<std::uint64_t> pulls;
};

}  // namespace

const char* to_string(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::StaticProportions: return "static_proportions";
    case AlgorithmKind::Uniform: return "uniform";
    case AlgorithmKind::SuccessiveRejects: return "successive_rejects";
    case AlgorithmKind::SuccessiveHalving: return "successive_halving";
  }
  return "unknown";
}

AlgorithmFamily AlgorithmFamily::static_proportions(Weights omega) {
  if (!omega.interior()) {
    fail(ErrorKind::InvalidWeights, "static proportions need weights in the interior of the simplex");
  }
  return AlgorithmFamily(AlgorithmKind::StaticProportions, std::move(omega));
}

std::uint64_t PullCounts::total() const noexcept {
  std::uint64_t t = 0;
  for (auto n : N) t += n;
  return t;
}

std::vector<std::uint32_t> tracking_sequence(const Weights& omega, std::size_t T) {
  const std::size_t K = omega.size();
  const auto w = omega.values();
  std::vector<std::uint32_t> seq(T);
  std::vector<std::uint64_t> N(K, 0);
  const double bound = static_cast<double>(K);
  for (std::size_t t = 0; t < T; ++t) {
    const double next = static_cast<double>(t + 1);
    std::size_t pick = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      const double deficit = static_cast<double>(N[k]) - w[k] * next;
      if (deficit < lowest) {
        lowest = deficit;
        pick = k;
      }
    }
    seq[t] = static_cast<std::uint32_t>(pick);
    ++N[pick];
    for (std::size_t k = 0; k < K; ++k) {
      if (std::abs(static_cast<double>(N[k]) - w[k] * next) > bound) {
        std::ostringstream os;
        os << "tracking invariant violated at t = " << t + 1 << " for arm " << k;
        fail(ErrorKind::OptimizerFailure, os.str());
      }
    }
  }
  return seq;
}

SuccessiveRejectsSchedule successive_rejects_schedule(std::size_t K, std::size_t T) {
  if (K < 2) fail(ErrorKind::InvalidInput, "successive rejects needs K >= 2");
  if (T <= K) fail(ErrorKind::Unsupported, "successive rejects needs T > K");
  double logbar = 0.5;
  for (std::size_t i = 2; i <= K; ++i) logbar += 1.0 / static_cast<double>(i);
  SuccessiveRejectsSchedule s;
  std::uint64_t previous = 0;
  std::uint64_t used = 0;
  for (std::size_t k = 1; k < K; ++k) {
    const double raw = static_cast<double>(T - K) / (logbar * static_cast<double>(K + 1 - k));
    const auto nk = static_cast<std::uint64_t>(std::ceil(raw));
    s.n.push_back(nk);
    s.per_arm.push_back(nk - previous);
    used += (nk - previous) * (K + 1 - k);
    previous = nk;
  }
  if (used > T) fail(ErrorKind::Unsupported, "successive rejects schedule exceeds the budget");
  s.remainder = T - used;
  return s;
}

SuccessiveHalvingSchedule successive_halving_schedule(std::size_t K, std::size_t T) {
  if (K < 2) fail(ErrorKind::InvalidInput, "successive halving needs K >= 2");
  std::size_t rounds = 0;
  while ((std::size_t{1} << rounds) < K) ++rounds;
  if (T < rounds * K) fail(ErrorKind::Unsupported, "successive halving needs T >= ceil(log2 K) K");
  SuccessiveHalvingSchedule s;
  const std::uint64_t budget = T / rounds;
  std::uint64_t alive = K;
  std::uint64_t used = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    s.survivors.push_back(alive);
    s.per_arm.push_back(budget / alive);
    used += (budget / alive) * alive;
    alive = (alive + 1) / 2;
  }
  s.remainder = T - used;
  return s;
}

RunOutcome run_once(const AlgorithmFamily& alg, const TaskSpec& task, const BanditInstance& instance,
                    std::size_t T, Philox4x32& rng) {
  const Plan plan = make_plan(alg, task, instance, T);
  return execute(plan, task, instance, rng);
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n, double z) {
  if (n == 0) fail(ErrorKind::InvalidParameter, "Wilson interval needs n >= 1");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SimResult estimate_error(const AlgorithmFamily& alg, const TaskSpec& task,
                         const BanditInstance& instance, std::size_t T, std::uint64_t n_reps,
                         std::uint64_t master_seed, const SimOptions& options) {
  if (n_reps == 0) fail(ErrorKind::InvalidParameter, "n_reps must be at least 1");
  const Plan plan = make_plan(alg, task, instance, T);
  const Answer truth = correct_answer(task, instance);
  const std::size_t K = instance.size();

  unsigned workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
  workers = std::max(1u, workers);
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_reps));

  std::vector<Tally> tallies(workers, Tally{0, std::vector<std::uint64_t>(K, 0)});
  auto work = [&](unsigned w) {
    const std::uint64_t begin = n_reps * w / workers;
    const std::uint64_t end = n_reps * (w + 1) / workers;
    Tally& tally = tallies[w];
    for (std::uint64_t r = begin; r < end; ++r) {
      Philox4x32 rng(master_seed, r);
      const RunOutcome run = execute(plan, task, instance, rng);
      if (run.answer != truth) ++tally.errors;
      for (std::size_t k = 0; k < K; ++k) tally.pulls[k] += run.pulls.N[k];
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }

  SimResult result;
  result.T = T;
  result.replications = n_reps;
  std::vector<std::uint64_t> pulls(K, 0);
  for (const Tally& t : tallies) {
    result.errors += t.errors;
    for (std::size_t k = 0; k < K; ++k) pulls[k] += t.pulls[k];
  }
  result.p_hat = static_cast<double>(result.errors) / static_cast<double>(n_reps);
  std::tie(result.ci_low, result.ci_high) = wilson_interval(result.errors, n_reps);
  if (result.p_hat > 0.0 && result.p_hat < 1.0) {
    result.h_hat = static_cast<double>(T) / -std::log(result.p_hat);
    if (options.H) result.ratio_hat = *result.h_hat / *options.H;
  }
  result.pre_asymptotic = result.p_hat >= 0.5;
  result.mean_pull_fractions.resize(K);
  const double denom = static_cast<double>(n_reps) * static_cast<double>(T);
  for (std::size_t k = 0; k < K; ++k) result.mean_pull_fractions[k] = static_cast<double>(pulls[k]) / denom;
  return result;
}

std::vector<SimResult> rate_curve(const AlgorithmFamily& alg, const TaskSpec& task,
                                  const BanditInstance& instance, std::span<const std::size_t> budgets,
                                  std::uint64_t n_reps, std::uint64_t master_seed,
                                  const SimOptions& options) {
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) fail(ErrorKind::InvalidInput, "budgets must be increasing");
  }
  std::vector<SimResult> out;
  out.reserve(budgets.size());
  for (std::size_t T : budgets) out.push_back(estimate_error(alg, task, instance, T, n_reps, master_seed, options));
  return out;
}

}  // namespace budgetid
