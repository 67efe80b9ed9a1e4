#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "budgetid/difficulty.hpp"

namespace budgetid {

namespace {

constexpr std::size_t kMaxArms = 3;
constexpr double kBernoulliEdge = 1e-6;
constexpr double kGaussianSpan = 8.0;

void linspace_into(std::vector<double>& out, double lo, double hi, std::size_t intervals) {
  for (std::size_t i = 0; i <= intervals; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(intervals));
  }
}

// Shared lambda grid: a coarse pass over the whole search range plus a fine
// pass over the hull of the means (and threshold), where the minimizers live.
std::vector<double> lambda_grid(const TaskSpec& task, const BanditInstance& instance,
                                std::size_t resolution) {
  const auto mu = instance.means();
  double lo = *std::min_element(mu.begin(), mu.end());
  double hi = *std::max_element(mu.begin(), mu.end());
  const bool uses_threshold =
      task.kind() == TaskKind::Thresholding || task.kind() == TaskKind::Positivity;
  if (uses_threshold) {
    lo = std::min(lo, task.threshold());
    hi = std::max(hi, task.threshold());
  }

  double range_lo = kBernoulliEdge;
  double range_hi = 1.0 - kBernoulliEdge;
  if (instance.all_gaussian()) {
    double sigma = 0.0;
    for (const auto& f : instance.families()) sigma = std::max(sigma, f.stddev());
    range_lo = *std::min_element(mu.begin(), mu.end()) - kGaussianSpan * sigma;
    range_hi = *std::max_element(mu.begin(), mu.end()) + kGaussianSpan * sigma;
  } else if (!instance.all_bernoulli()) {
    fail(ErrorKind::Unsupported, "grid oracle needs all arms from one kind of family");
  }

  std::vector<double> grid;
  linspace_into(grid, range_lo, range_hi, std::max<std::size_t>(resolution / 8, 8));
  linspace_into(grid, lo, hi, resolution);
  grid.insert(grid.end(), mu.begin(), mu.end());
  if (uses_threshold) grid.push_back(task.threshold());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

DifficultyResult grid_oracle(const TaskSpec& task, const BanditInstance& instance,
                             std::size_t resolution) {
  const std::size_t K = instance.size();
  if (K > kMaxArms) fail(ErrorKind::Unsupported, "grid oracle is limited to K <= 3");
  if (resolution < 2) fail(ErrorKind::InvalidParameter, "grid resolution must be at least 2");
  const auto report = validate_instance(task, instance);
  if (!report.ok) fail(ErrorKind::DegenerateInstance, report.issues.front());

  const auto mu = instance.means();
  const std::vector<double> grid = lambda_grid(task, instance, resolution);
  const std::size_t G = grid.size();

  std::array<std::vector<double>, kMaxArms> cost;
  std::array<std::size_t, kMaxArms> home{};
  for (std::size_t k = 0; k < K; ++k) {
    cost[k].resize(G);
    for (std::size_t g = 0; g < G; ++g) cost[k][g] = kl(instance.family(k), grid[g], mu[k]);
    home[k] = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), mu[k]) - grid.begin());
  }

  // Enumerate the lambda grid and keep closure points from which no single
  // step toward mu stays in the closure. The minimum of any nonnegative
  // weighting over the closure grid is attained at such a point.
  std::vector<std::array<std::size_t, kMaxArms>> kept;
  std::array<std::size_t, kMaxArms> idx{};
  std::array<double, kMaxArms> lambda{};
  const std::span<const double> lambda_view(lambda.data(), K);
  auto in_closure = [&](const std::array<std::size_t, kMaxArms>& at) {
    for (std::size_t k = 0; k < K; ++k) lambda[k] = grid[at[k]];
    return in_alternative_closure(task, mu, lambda_view);
  };
  while (true) {
    if (in_closure(idx)) {
      bool minimal = true;
      for (std::size_t k = 0; k < K && minimal; ++k) {
        if (idx[k] == home[k]) continue;
        auto step = idx;
        step[k] = idx[k] < home[k] ? idx[k] + 1 : idx[k] - 1;
        minimal = !in_closure(step);
      }
      if (minimal) kept.push_back(idx);
    }
    std::size_t k = 0;
    while (k < K && ++idx[k] == G) idx[k++] = 0;
    if (k == K) break;
  }
  if (kept.empty()) fail(ErrorKind::OptimizerFailure, "grid oracle found no alternative on its grid");

  std::vector<double> flat(kept.size() * K);
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (std::size_t k = 0; k < K; ++k) flat[j * K + k] = cost[k][kept[j][k]];
  }

  // Max over compositions of `resolution` into K parts of the min over kept points.
  double best_value = -1.0;
  std::array<std::size_t, kMaxArms> best_parts{};
  std::size_t best_point = 0;
  std::array<std::size_t, kMaxArms> parts{};
  const double step = 1.0 / static_cast<double>(resolution);
  auto scan = [&]() {
    std::array<double, kMaxArms> w{};
    for (std::size_t k = 0; k < K; ++k) w[k] = static_cast<double>(parts[k]) * step;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < K; ++k) s += w[k] * flat[j * K + k];
      if (s < worst) {
        worst = s;
        arg = j;
        if (worst <= best_value) break;
      }
    }
    if (worst > best_value) {
      best_value = worst;
      best_parts = parts;
      best_point = arg;
    }
  };
  if (K == 2) {
    for (std::size_t a = 0; a <= resolution; ++a) {
      parts = {a, resolution - a, 0};
      scan();
    }
  } else {
    for (std::size_t a = 0; a <= resolution; ++a) {
      for (std::size_t b = 0; a + b <= resolution; ++b) {
        parts = {a, b, resolution - a - b};
        scan();
      }
    }
  }
  if (!(best_value > 0.0)) {
    fail(ErrorKind::OptimizerFailure, "grid oracle value is zero; refine the grid");
  }

  DifficultyResult result;
  result.inverse_rate = best_value;
  result.H = 1.0 / best_value;
  std::vector<double> omega(K);
  for (std::size_t k = 0; k < K; ++k) omega[k] = static_cast<double>(best_parts[k]) * step;
  result.omega_star = Weights::normalized(std::move(omega));
  result.lambda_star.resize(K);
  for (std::size_t k = 0; k < K; ++k) result.lambda_star[k] = grid[kept[best_point][k]];
  result.method = Method::GridOracle;
  return result;
}

}  // namespace budgetid
