#include <cmath>
#include <numbers>
#include <vector>

#include "budgetid/bounds.hpp"
#include "budgetid/simulator.hpp"
#include "doctest.h"
#include "grid_minimizer.hpp"

using namespace budgetid;
using doctest::Approx;

namespace {

BanditInstance bern(std::vector<double> m) { return BanditInstance(Family::bernoulli(), std::move(m)); }
BanditInstance gauss(std::vector<double> m) { return BanditInstance(Family::gaussian(), std::move(m)); }

DifficultyFn oracle_H(const TaskSpec& task) {
  return [task](const BanditInstance& b) { return oracle_difficulty_sp(task, b).H; };
}

}  // namespace

TEST_CASE("ratio from an error probability") {
  CHECK(*ratio_from_error(std::exp(-2.0), 100, 10.0) == Approx(5.0));
  CHECK_FALSE(ratio_from_error(0.0, 100, 10.0).has_value());
  CHECK_FALSE(ratio_from_error(1.0, 100, 10.0).has_value());
}

TEST_CASE("finite-budget inequality") {
  const auto task = TaskSpec::best_arm();
  const auto mu = bern({0.6, 0.4});
  const std::vector<double> lambda{0.4, 0.6};
  const double H_lambda = oracle_difficulty_sp(task, bern(lambda)).H;

  SUBCASE("uniform sampling end to end") {
    const std::size_t T = 10000;
    const auto sim = estimate_error(AlgorithmFamily::uniform(), task, mu, T, 1000, 17);
    const double ratio_lambda = sp_rate(task, bern(lambda), Weights::uniform(2)) / H_lambda;
    const auto c = finite_T_check(task, mu, lambda, H_lambda, T, sim.mean_pull_fractions, sim.p_hat, ratio_lambda);
    CHECK(c.satisfied);
    CHECK(c.lhs == Approx((1 - sim.p_hat) / ratio_lambda - std::numbers::ln2 / 100));
  }
  SUBCASE("always wrong") {
    const std::vector<double> f{0.5, 0.5};
    const auto c = finite_T_check(task, mu, lambda, H_lambda, 10000, f, 1.0, 1.0);
    CHECK(c.lhs <= 0.0);
    CHECK(c.rhs >= 0.0);
    CHECK(c.satisfied);
  }
  SUBCASE("precondition on H") {
    const std::vector<double> f{0.5, 0.5};
    try {
      finite_T_check(task, mu, lambda, std::sqrt(10000.0) + 1, 10000, f, 0.1, 1.0);
      FAIL("expected a precondition error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Precondition);
    }
  }
  SUBCASE("lambda must be an alternative") {
    const std::vector<double> f{0.5, 0.5};
    const std::vector<double> same{0.7, 0.3};
    CHECK_THROWS_AS(finite_T_check(task, mu, same, 10, 10000, f, 0.1, 1.0), Error);
  }
}

TEST_CASE("limsup bound") {
  SUBCASE("single alternative concentrates on the largest KL") {
    const auto mu = bern({0.6, 0.4});
    const std::vector<std::vector<double>> D{{0.3, 0.45}};
    const std::vector<double> H{7.0};
    const auto r = limsup_ratio_lb(TaskSpec::best_arm(), mu, D, H);
    const Family f = Family::bernoulli();
    const double best = std::max(kl(f, 0.6, 0.3), kl(f, 0.4, 0.45));
    CHECK(r.lower_bound == Approx(1.0 / (7.0 * best)).epsilon(1e-12));
    CHECK((*r.omega)[0] == Approx(1.0));
  }
  SUBCASE("matches the corner bound on a corner set") {
    const Family f = Family::bernoulli();
    const std::size_t K = 4;
    const double m = 0.6, ell = 0.01, theta = 0.5;
    const auto task = TaskSpec::positivity(theta);
    const auto mu = bern(std::vector<double>(K, m));
    std::vector<std::vector<double>> D;
    std::vector<double> H;
    for (std::size_t j = 0; j < K; ++j) {
      std::vector<double> l(K, m);
      l[j] = ell;
      H.push_back(oracle_difficulty_sp(task, bern(l)).H);
      D.push_back(std::move(l));
    }
    const auto a = limsup_ratio_lb(task, mu, D, H);
    const auto b = positivity_bound(f, K, m, ell, theta);
    CHECK(a.lower_bound == Approx(b.lower_bound).epsilon(1e-8));
  }
  SUBCASE("input checks") {
    const auto mu = bern({0.6, 0.4});
    const std::vector<std::vector<double>> D{{0.7, 0.3}};
    const std::vector<double> H{1.0};
    CHECK_THROWS_AS(limsup_ratio_lb(TaskSpec::best_arm(), mu, D, H), Error);
    const std::vector<std::vector<double>> none;
    const std::vector<double> noH;
    CHECK_THROWS_AS(limsup_ratio_lb(TaskSpec::best_arm(), mu, none, noH), Error);
  }
}

TEST_CASE("corner construction") {
  const auto task = TaskSpec::best_arm();
  SUBCASE("symmetric two-term construction") {
    const auto base = gauss({0.0, 0.0 - 1.0});
    CornerConstruction c{task, base, {{0, {-2.0, -1.0}}, {1, {0.0, 1.0}}}, oracle_H(task)};
    const auto r = corner_lb(c);
    CHECK((*r.omega)[0] == Approx(0.5));
    CHECK(r.contributions[0] == Approx(r.contributions[1]));
  }
  SUBCASE("invariant checks") {
    const auto base = gauss({0.0, -1.0});
    CornerConstruction twice{task, base, {{1, {0.0, 1.0}}, {1, {0.0, 2.0}}}, oracle_H(task)};
    CHECK_THROWS_AS(corner_lb(twice), Error);
    CornerConstruction two_coords{task, base, {{1, {-5.0, 1.0}}}, oracle_H(task)};
    CHECK_THROWS_AS(corner_lb(two_coords), Error);
    CornerConstruction not_alt{task, base, {{1, {0.0, -0.5}}}, oracle_H(task)};
    CHECK_THROWS_AS(corner_lb(not_alt), Error);
  }
  SUBCASE("half-space corners cannot exceed one half") {
    const auto ht = TaskSpec::half_space({0.5, -0.5}, 0.0);
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      const auto base = gauss({-eps, 0.0});
      for (double x : {0.1, 1.0, 10.0}) {
        CornerConstruction c{ht, base, {{0, {x, 0.0}}, {1, {-eps, -x - eps}}}, oracle_H(ht)};
        CHECK(corner_lb(c).lower_bound <= 0.5 + 1e-12);
      }
    }
  }
}

TEST_CASE("two-arm Bernoulli construction") {
  double prev = 0;
  for (int d = 3; d <= 11; d += 2) {
    const double v = bernoulli_two_arm_bound(std::pow(10.0, -d)).lower_bound;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(bernoulli_two_arm_bound(1e-9).lower_bound > 1.0);
  CHECK(bernoulli_two_arm_bound(1e-8).lower_bound < 1.0);
  const auto [l1, l2] = bernoulli_two_arm_limits();
  CHECK(l1 == Approx(0.22281280991627289).epsilon(1e-14));
  CHECK(l2 == 1.0);
  const auto far = bernoulli_two_arm_bound(1e-200);
  CHECK(far.contributions[0] == Approx(l1).epsilon(1e-10));
  // The second term approaches 1 only logarithmically in x.
  CHECK(far.contributions[1] < l2);
  CHECK(far.contributions[1] > 0.98);
  CHECK(far.contributions[1] > bernoulli_two_arm_bound(1e-12).contributions[1]);
  for (double x : {1e-3, 1e-6, 2e-8, 1e-7}) {
    CHECK(bernoulli_two_arm_bound_extended(x).lower_bound ==
          Approx(bernoulli_two_arm_bound(x).lower_bound).epsilon(1e-6));
  }
  CHECK_THROWS_AS(bernoulli_two_arm_bound(0.5), Error);
  CHECK_THROWS_AS(bernoulli_two_arm_bound(0.0), Error);
  CHECK_THROWS_AS(bernoulli_two_arm_bound_extended(0.45), Error);
}

TEST_CASE("Gaussian log K construction") {
  for (std::size_t K : {10u, 100u, 1000u}) {
    const auto r = gaussian_bai_bound(K, 1.0);
    CHECK(r.floor == Approx((std::log(K + 1.0) - std::log(2.0)) / 8).epsilon(1e-14));
    CHECK(r.ratio.lower_bound >= r.floor);
    CHECK(r.csp_bound == Approx(r.ratio.lower_bound / 2));
    CHECK(r.csp_bound >= r.csp_floor);
    for (double delta : {0.1, 10.0}) {
      CHECK(gaussian_bai_bound(K, delta).ratio.lower_bound == Approx(r.ratio.lower_bound).epsilon(1e-12));
    }
  }
  // Direct evaluation for K = 3: mu = (0, -2, -3), lambda^(j) moves arm j to j Delta.
  const auto inst = [](double a, double b, double c) { return gauss({a, b, c}); };
  const double direct = 1 / (h_delta(inst(0, 2, -3)) * 8.0) + 1 / (h_delta(inst(0, -2, 3)) * 18.0);
  CHECK(gaussian_bai_bound(3, 1.0).ratio.lower_bound == Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_bai_bound(1, 1.0), Error);
}

TEST_CASE("positivity construction") {
  const Family f = Family::bernoulli();
  const double theta = 0.5, m = 0.6;
  SUBCASE("closed form") {
    const auto r = positivity_bound(f, 5, m, 0.1, theta);
    CHECK(r.lower_bound == Approx(5 * kl(f, theta, 0.1) / kl(f, m, 0.1)).epsilon(1e-10));
  }
  SUBCASE("increasing as ell decreases") {
    const std::vector<double> ells{0.1, 0.01, 0.001};
    const auto sweep = positivity_sweep(f, 5, m, theta, ells);
    CHECK(sweep[1].lower_bound > sweep[0].lower_bound);
    CHECK(sweep[2].lower_bound > sweep[1].lower_bound);
    CHECK(sweep[2].lower_bound < 5.0);
  }
  SUBCASE("single arm") {
    const auto r = positivity_bound(f, 1, m, 0.1, theta);
    CHECK(r.lower_bound == Approx(kl(f, theta, 0.1) / kl(f, m, 0.1)));
    CHECK(r.lower_bound <= 1.0);
  }
  SUBCASE("uniform sampling is within a factor K on each alternative") {
    const std::size_t K = 5;
    for (std::size_t j = 0; j < K; ++j) {
      std::vector<double> l(K, m);
      l[j] = 1e-3;
      const auto inst = bern(l);
      const auto task = TaskSpec::positivity(theta);
      CHECK(sp_rate(task, inst, Weights::uniform(K)) <= K * oracle_difficulty_sp(task, inst).H * (1 + 1e-8));
    }
  }
  CHECK_THROWS_AS(positivity_bound(f, 5, 0.4, 0.1, theta), Error);
  CHECK_THROWS_AS(positivity_bound(f, 0, m, 0.1, theta), Error);
}

TEST_CASE("half-space boundary sweep") {
  const auto g = gauss({0.0, 0.0});
  const auto task = TaskSpec::half_space({1.0, -2.0}, 0.0).normalized_for(g);
  const double un = task.normal()[0] * task.normal()[0] + task.normal()[1] * task.normal()[1];
  const auto mu = gauss({-1e-3 * task.normal()[0] / un, -1e-3 * task.normal()[1] / un});
  const auto sweep = half_space_boundary_sweep(task, mu, 1.0, 7);
  REQUIRE(sweep.size() == 7);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].ratio.lower_bound >= sweep[i - 1].ratio.lower_bound - 1e-12);
    CHECK(sweep[i].alternatives == (std::size_t{1} << (i + 1)) - 1);
  }
  CHECK(sweep.back().ratio.lower_bound > 0.95);
  CHECK(sweep.back().ratio.lower_bound <= 1.0 + 1e-9);
  CHECK_THROWS_AS(half_space_boundary_sweep(TaskSpec::best_arm(), mu, 1.0, 3), Error);
}
