#include "budgetid/difficulty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "budgetid/game_lp.hpp"

namespace budgetid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_valid(const TaskSpec& task, const BanditInstance& instance) {
  const auto report = validate_instance(task, instance);
  if (!report.ok) fail(ErrorKind::DegenerateInstance, report.issues.front());
}

void require_size(const BanditInstance& instance, std::size_t n) {
  if (instance.size() != n) {
    fail(ErrorKind::InvalidInput, "weights and instance have different numbers of arms");
  }
}

void require_threshold_reachable(const TaskSpec& task, const BanditInstance& instance) {
  for (const auto& f : instance.families()) {
    if (!f.in_mean_closure(task.threshold())) {
      std::ostringstream os;
      os << "threshold " << task.threshold() << " lies outside the " << to_string(f.kind())
         << " mean domain";
      fail(ErrorKind::InvalidParameter, os.str());
    }
  }
}

void require_gaussian_half_space(const BanditInstance& instance) {
  if (!instance.all_gaussian()) {
    fail(ErrorKind::Unsupported, "half-space identification is only supported for Gaussian arms");
  }
}

// Minimizer of wi KL(x, mu_i) + wa KL(x, mu_a) over x.
double pair_meeting_point(const Family& fi, double mi, double wi, const Family& fa, double ma,
                          double wa) {
  if (wi + wa <= 0.0) wi = wa = 1.0;
  if (wa == 0.0) return mi;
  if (wi == 0.0) return ma;
  if (fi == fa) {
    const double xi = (wi * natural_of_mean(fi, mi) + wa * natural_of_mean(fa, ma)) / (wi + wa);
    return mean_of_natural(fi, xi);
  }
  if (fi.is_gaussian() && fa.is_gaussian()) {
    const double pi = wi / fi.variance();
    const double pa = wa / fa.variance();
    return (pi * mi + pa * ma) / (pi + pa);
  }
  fail(ErrorKind::Unsupported, "best-arm pairs mixing Gaussian and Bernoulli arms are not supported");
}

BestResponse bai_response(const BanditInstance& instance, std::span<const double> w) {
  const auto mu = instance.means();
  const std::size_t best = best_arm_index(mu);
  BestResponse out{kInf, {}};
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (a == best) continue;
    const double x = pair_meeting_point(instance.family(best), mu[best], w[best], instance.family(a),
                                        mu[a], w[a]);
    const double value =
        w[best] * kl(instance.family(best), x, mu[best]) + w[a] * kl(instance.family(a), x, mu[a]);
    if (value < out.value) {
      out.value = value;
      out.lambda.assign(mu.begin(), mu.end());
      out.lambda[best] = x;
      out.lambda[a] = x;
    }
  }
  return out;
}

BestResponse single_arm_response(const TaskSpec& task, const BanditInstance& instance,
                                 std::span<const double> w) {
  const auto mu = instance.means();
  const double theta = task.threshold();
  BestResponse out{kInf, {}};
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double value = w[k] * kl(instance.family(k), theta, mu[k]);
    if (value < out.value) {
      out.value = value;
      out.lambda.assign(mu.begin(), mu.end());
      out.lambda[k] = theta;
    }
  }
  return out;
}

BestResponse below_set_response(const TaskSpec& task, const BanditInstance& instance,
                                std::span<const double> w) {
  const auto mu = instance.means();
  const double theta = task.threshold();
  BestResponse out{0.0, {mu.begin(), mu.end()}};
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k] < theta) {
      out.value += w[k] * kl(instance.family(k), theta, mu[k]);
      out.lambda[k] = theta;
    }
  }
  return out;
}

BestResponse half_space_response(const TaskSpec& task, const BanditInstance& instance,
                                 std::span<const double> w) {
  require_gaussian_half_space(instance);
  const auto mu = instance.means();
  const auto u = task.normal();
  double margin = -task.offset();
  for (std::size_t k = 0; k < mu.size(); ++k) margin += mu[k] * u[k];

  BestResponse out{0.0, {mu.begin(), mu.end()}};
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (u[k] != 0.0 && w[k] == 0.0) {
      // An unsampled arm can absorb the whole move at no cost.
      out.lambda[k] = mu[k] - margin / u[k];
      return out;
    }
  }
  double spread = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (u[k] != 0.0) spread += u[k] * u[k] * instance.family(k).variance() / w[k];
  }
  out.value = 0.5 * margin * margin / spread;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (u[k] != 0.0) {
      out.lambda[k] = mu[k] - margin * (u[k] * instance.family(k).variance() / w[k]) / spread;
    }
  }
  return out;
}

bool all_above(const TaskSpec& task, std::span<const double> mu) {
  return std::all_of(mu.begin(), mu.end(), [&](double m) { return m > task.threshold(); });
}

std::vector<double> cost_vector(const BanditInstance& instance, std::span<const double> lambda) {
  std::vector<double> c(instance.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = kl(instance.family(k), lambda[k], instance.mean(k));
  return c;
}

DifficultyResult finish(double inverse_rate, std::vector<double> omega, std::vector<double> lambda,
                        Method method) {
  if (!(inverse_rate > 0.0) || !std::isfinite(inverse_rate)) {
    fail(ErrorKind::OptimizerFailure, "difficulty computation produced a non-positive rate");
  }
  DifficultyResult r;
  r.inverse_rate = inverse_rate;
  r.H = 1.0 / inverse_rate;
  r.omega_star = Weights::normalized(std::move(omega));
  r.lambda_star = std::move(lambda);
  r.method = method;
  return r;
}

std::vector<double> inverse_proportional(std::span<const double> costs) {
  std::vector<double> w(costs.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = 1.0 / costs[k];
  return w;
}

// Closed forms available for the unrestricted problem, if any.
std::optional<DifficultyResult> try_closed_form(const TaskSpec& task, const BanditInstance& instance) {
  const auto mu = instance.means();
  const std::size_t K = mu.size();
  switch (task.kind()) {
    case TaskKind::BestArm:
      if (K == 2 && instance.homogeneous()) return closed_form_expfam_bai_2(instance);
      return std::nullopt;
    case TaskKind::Thresholding:
    case TaskKind::Positivity: {
      require_threshold_reachable(task, instance);
      std::vector<double> costs(K);
      for (std::size_t k = 0; k < K; ++k) costs[k] = kl(instance.family(k), task.threshold(), mu[k]);
      if (task.kind() == TaskKind::Positivity && !all_above(task, mu)) {
        // Only arms below the threshold matter; the best is a vertex.
        std::size_t pick = K;
        for (std::size_t k = 0; k < K; ++k) {
          if (mu[k] < task.threshold() && (pick == K || costs[k] > costs[pick])) pick = k;
        }
        std::vector<double> omega(K, 0.0);
        omega[pick] = 1.0;
        auto br = below_set_response(task, instance, omega);
        return finish(costs[pick], std::move(omega), std::move(br.lambda), Method::ClosedForm);
      }
      auto omega = inverse_proportional(costs);
      const double total = std::accumulate(omega.begin(), omega.end(), 0.0);
      for (double& w : omega) w /= total;
      auto br = single_arm_response(task, instance, omega);
      return finish(1.0 / total, std::move(omega), std::move(br.lambda), Method::ClosedForm);
    }
    case TaskKind::HalfSpace: {
      require_gaussian_half_space(instance);
      const auto u = task.normal();
      double margin = -task.offset();
      double scale = 0.0;
      std::vector<double> omega(K);
      for (std::size_t k = 0; k < K; ++k) {
        margin += mu[k] * u[k];
        omega[k] = std::abs(u[k]) * instance.family(k).stddev();
        scale += omega[k];
      }
      for (double& w : omega) w /= scale;
      auto br = half_space_response(task, instance, omega);
      return finish(0.5 * margin * margin / (scale * scale), std::move(omega), std::move(br.lambda),
                    Method::ClosedForm);
    }
  }
  return std::nullopt;
}

// Cutting-plane ascent. Every best response lambda gives a linear
// overestimate  w -> sum_k w_k KL(lambda_k, mu_k)  of the concave objective;
// maximizing the minimum of the collected planes is a finite matrix game.
DifficultyResult cutting_plane(const TaskSpec& task, const BanditInstance& instance,
                               const OracleOptions& options) {
  const std::size_t K = instance.size();
  const double floor = options.min_weight;
  const double free_mass = 1.0 - floor * static_cast<double>(K);

  auto to_omega = [&](std::span<const double> nu) {
    std::vector<double> omega(K);
    for (std::size_t k = 0; k < K; ++k) omega[k] = floor + free_mass * nu[k];
    return omega;
  };

  PayoffMatrix model(K);
  std::vector<double> row(K);
  auto add_cut = [&](std::span<const double> costs) {
    const double base = floor * std::accumulate(costs.begin(), costs.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) row[k] = base + free_mass * costs[k];
    model.add_row(row);
  };

  double lower = 0.0;
  std::vector<double> best_omega;
  std::vector<double> best_lambda;
  auto evaluate = [&](std::span<const double> nu) {
    auto omega = to_omega(nu);
    auto br = detail::best_response_closure(task, instance, omega);
    auto costs = cost_vector(instance, br.lambda);
    if (br.value > lower || best_omega.empty()) {
      lower = br.value;
      best_omega = omega;
      best_lambda = br.lambda;
    }
    add_cut(costs);
    return costs;
  };

  // Short multiplicative-weights warm start; its iterates seed the model.
  std::vector<double> nu(K, 1.0 / static_cast<double>(K));
  const std::size_t warm = 4 * K + 8;
  for (std::size_t t = 0; t < warm; ++t) {
    const auto costs = evaluate(nu);
    const double top = *std::max_element(costs.begin(), costs.end());
    if (!(top > 0.0)) break;
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      nu[k] *= std::exp(0.5 * costs[k] / top);
      total += nu[k];
    }
    for (double& v : nu) v /= total;
    for (std::size_t k = 0; k < K; ++k) nu[k] = 0.5 * nu[k] + 0.5 / static_cast<double>(K);
  }

  OptimizerDiagnostics diag;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const GameSolution game = solve_maximin(model);
    diag.iterations = it + 1;
    diag.upper = game.value;
    evaluate(game.weights);
    diag.lower = lower;
    diag.cuts = model.rows();
    if (lower > 0.0) {
      diag.relative_gap = (diag.upper - lower) / lower;
      if (diag.relative_gap <= options.tolerance) {
        auto result = finish(lower, best_omega, best_lambda, Method::Optimizer);
        result.diagnostics = diag;
        return result;
      }
    }
  }
  std::ostringstream os;
  os << "oracle difficulty optimizer did not converge: " << diag.iterations << " iterations, "
     << diag.cuts << " cuts, model value " << diag.upper << ", best value " << diag.lower
     << ", relative gap " << diag.relative_gap;
  fail(ErrorKind::OptimizerFailure, os.str());
}

}  // namespace

Weights::Weights(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorKind::InvalidWeights, "weights must not be empty");
  double total = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::InvalidWeights, "weights must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", not 1";
    fail(ErrorKind::InvalidWeights, os.str());
  }
}

Weights Weights::uniform(std::size_t arms) {
  if (arms == 0) fail(ErrorKind::InvalidWeights, "weights must not be empty");
  return Weights(std::vector<double>(arms, 1.0 / static_cast<double>(arms)));
}

Weights Weights::normalized(std::vector<double> values) {
  double total = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      fail(ErrorKind::InvalidWeights, "weights must be finite and nonnegative");
    }
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorKind::InvalidWeights, "weights must not all be zero");
  for (double& v : values) v /= total;
  // Put the rounding residue on the largest entry so the sum check passes.
  const double residue = 1.0 - std::accumulate(values.begin(), values.end(), 0.0);
  *std::max_element(values.begin(), values.end()) += residue;
  return Weights(std::move(values));
}

double Weights::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::ClosedForm: return "closed_form";
    case Method::Optimizer: return "optimizer";
    case Method::GridOracle: return "grid_oracle";
  }
  return "unknown";
}

namespace detail {

BestResponse best_response_closure(const TaskSpec& task, const BanditInstance& instance,
                                   std::span<const double> omega) {
  switch (task.kind()) {
    case TaskKind::BestArm:
      return bai_response(instance, omega);
    case TaskKind::Thresholding:
      require_threshold_reachable(task, instance);
      return single_arm_response(task, instance, omega);
    case TaskKind::Positivity:
      require_threshold_reachable(task, instance);
      return all_above(task, instance.means()) ? single_arm_response(task, instance, omega)
                                               : below_set_response(task, instance, omega);
    case TaskKind::HalfSpace:
      return half_space_response(task, instance, omega);
  }
  fail(ErrorKind::Unsupported, "unknown task");
}

}  // namespace detail

BestResponse best_response(const TaskSpec& task, const BanditInstance& instance, const Weights& omega) {
  require_size(instance, omega.size());
  if (!omega.interior()) {
    fail(ErrorKind::InvalidWeights, "best response needs weights in the interior of the simplex");
  }
  require_valid(task, instance);
  return detail::best_response_closure(task, instance, omega.values());
}

double sp_rate(const TaskSpec& task, const BanditInstance& instance, const Weights& omega) {
  return 1.0 / best_response(task, instance, omega).value;
}

DifficultyResult oracle_difficulty_sp(const TaskSpec& task, const BanditInstance& instance,
                                      const OracleOptions& options) {
  require_valid(task, instance);
  const double K = static_cast<double>(instance.size());
  if (!(options.min_weight >= 0.0) || options.min_weight * K > 1.0) {
    fail(ErrorKind::InvalidParameter, "min_weight must lie in [0, 1/K]");
  }
  if (!(options.tolerance > 0.0)) fail(ErrorKind::InvalidParameter, "tolerance must be positive");
  if (options.min_weight * K == 1.0) {
    auto omega = Weights::uniform(instance.size());
    auto br = detail::best_response_closure(task, instance, omega.values());
    return finish(br.value, {omega.values().begin(), omega.values().end()}, std::move(br.lambda),
                  Method::ClosedForm);
  }
  if (options.min_weight == 0.0 && !options.force_optimizer) {
    if (auto closed = try_closed_form(task, instance)) return *closed;
  }
  if (task.kind() == TaskKind::HalfSpace) require_gaussian_half_space(instance);
  return cutting_plane(task, instance, options);
}

DifficultyResult closed_form_expfam_bai_2(const BanditInstance& instance) {
  if (instance.size() != 2) fail(ErrorKind::Unsupported, "the two-arm closed form needs K = 2");
  if (!instance.homogeneous()) {
    fail(ErrorKind::Unsupported, "the two-arm closed form needs both arms in the same family");
  }
  require_valid(TaskSpec::best_arm(), instance);
  if (instance.all_bernoulli()) return closed_form_bernoulli_bai(instance);

  const Family& f = instance.family(0);
  const double m1 = instance.mean(0);
  const double m2 = instance.mean(1);
  const double xi1 = natural_of_mean(f, m1);
  const double xi2 = natural_of_mean(f, m2);
  // Gaussian: (phi(xi1) - phi(xi2)) / (xi1 - xi2) reduces to the midpoint.
  const double x = 0.5 * (m1 + m2);
  const double omega_1 = (natural_of_mean(f, x) - xi2) / (xi1 - xi2);
  auto result = finish(kl(f, x, m1), {omega_1, 1.0 - omega_1}, {x, x}, Method::ClosedForm);
  result.x_star = x;
  return result;
}

DifficultyResult closed_form_bernoulli_bai(const BanditInstance& instance) {
  if (instance.size() != 2 || !instance.all_bernoulli()) {
    fail(ErrorKind::Unsupported, "the Bernoulli closed form needs two Bernoulli arms");
  }
  require_valid(TaskSpec::best_arm(), instance);
  const auto cf = detail::bernoulli_bai_closed_form<double>(instance.mean(0), instance.mean(1));
  const double omega_1 = std::clamp(cf.omega_1, 0.0, 1.0);
  auto result = finish(cf.inverse_rate, {omega_1, 1.0 - omega_1}, {cf.x_star, cf.x_star},
                       Method::ClosedForm);
  result.x_star = cf.x_star;
  return result;
}

double h_delta(const BanditInstance& instance) {
  for (const auto& f : instance.families()) {
    if (!f.is_gaussian() || f.variance() != 1.0) {
      fail(ErrorKind::Unsupported, "H_Delta is defined for unit-variance Gaussian arms only");
    }
  }
  require_valid(TaskSpec::best_arm(), instance);
  const auto mu = instance.means();
  const std::size_t best = best_arm_index(mu);
  double smallest = kInf;
  double sum = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (k == best) continue;
    const double gap = mu[best] - mu[k];
    smallest = std::min(smallest, gap);
    sum += 2.0 / (gap * gap);
  }
  return 2.0 / (smallest * smallest) + sum;
}

BallRestrictedResult ball_restricted_difficulty(const BanditInstance& instance,
                                                std::span<const double> eta,
                                                std::span<const double> u, double radius) {
  require_gaussian_half_space(instance);
  const std::size_t K = instance.size();
  if (eta.size() != K || u.size() != K) {
    fail(ErrorKind::InvalidInput, "eta and u must have one entry per arm");
  }
  if (!(radius > 0.0)) fail(ErrorKind::InvalidParameter, "radius must be positive");
  double l1 = 0.0;
  for (std::size_t k = 0; k < K; ++k) l1 += std::abs(u[k]) * instance.family(k).stddev();
  if (std::abs(l1 - 1.0) > 1e-12) {
    fail(ErrorKind::InvalidParameter, "u must satisfy sum_k |u_k| sigma_k = 1");
  }

  auto sigma_norm = [&](std::span<const double> v) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = v[k] - eta[k];
      s += d * d / instance.family(k).variance();
    }
    return std::sqrt(s);
  };

  const auto mu = instance.means();
  double offset = 0.0;
  for (std::size_t k = 0; k < K; ++k) offset += (mu[k] - eta[k]) * u[k];
  const double inner = radius / (std::sqrt(static_cast<double>(K)) + 1.0);
  if (!(offset < 0.0)) {
    fail(ErrorKind::Precondition, "mu must lie strictly on the negative side of the hyperplane");
  }
  if (sigma_norm(mu) > inner) {
    fail(ErrorKind::Precondition, "mu must lie in the shrunken ball B(eta, r / (sqrt(K) + 1))");
  }

  BallRestrictedResult out;
  out.value = offset * offset;
  out.witness.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double sign = u[k] > 0.0 ? 1.0 : (u[k] < 0.0 ? -1.0 : 0.0);
    out.witness[k] = mu[k] - offset * sign * instance.family(k).stddev();
  }
  for (std::size_t k = 0; k < K; ++k) out.witness_offset += (out.witness[k] - eta[k]) * u[k];
  out.witness_distance = sigma_norm(out.witness);
  out.witness_in_ball = out.witness_distance <= radius * (1.0 + 1e-12);
  return out;
}

}  // namespace budgetid
