// Randomized invariants with fixed seeds.

#include <algorithm>
#include <cmath>
#include <vector>

#include "budgetid/difficulty.hpp"
#include "budgetid/exp_family.hpp"
#include "budgetid/simulator.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace budgetid;
using doctest::Approx;

namespace {
BanditInstance bern(std::vector<double> m) { return BanditInstance(Family::bernoulli(), std::move(m)); }
BanditInstance gauss(std::vector<double> m) { return BanditInstance(Family::gaussian(), std::move(m)); }
}  // namespace

TEST_CASE("kl is nonnegative and vanishes only on the diagonal") {
  oracle::Gen gen(101);
  for (int i = 0; i < 2000; ++i) {
    const double x = gen.uniform(1e-6, 1 - 1e-6);
    const double y = gen.uniform(1e-6, 1 - 1e-6);
    const double v = kl(Family::bernoulli(), x, y);
    REQUIRE(v >= 0.0);
    if (x != y) REQUIRE(v > 0.0);
    // Pinsker: KL >= 2 (x - y)^2.
    REQUIRE(v >= 2 * (x - y) * (x - y) * (1 - 1e-9));
  }
}

TEST_CASE("oracle difficulty is invariant under arm permutations") {
  oracle::Gen gen(102);
  for (int i = 0; i < 40; ++i) {
    const std::size_t K = gen.index(2, 5);
    auto mu = gen.separated(K, 0.05, 0.95, 0.02);
    const auto task = i % 2 ? TaskSpec::best_arm() : TaskSpec::thresholding(0.5);
    if (!validate_instance(task, bern(mu)).ok) continue;
    const double H = oracle_difficulty_sp(task, bern(mu)).H;
    std::shuffle(mu.begin(), mu.end(), gen.engine());
    REQUIRE(oracle_difficulty_sp(task, bern(mu)).H == Approx(H).epsilon(1e-7));
  }
}

TEST_CASE("Gaussian best-arm difficulty scales and translates") {
  oracle::Gen gen(103);
  for (int i = 0; i < 40; ++i) {
    const std::size_t K = gen.index(2, 5);
    auto mu = gen.separated(K, -1, 1, 0.05);
    const double H = oracle_difficulty_sp(TaskSpec::best_arm(), gauss(mu)).H;
    const double c = gen.uniform(0.2, 5.0);
    const double s = gen.uniform(-10, 10);
    auto moved = mu;
    for (auto& x : moved) x = c * x + s;
    REQUIRE(oracle_difficulty_sp(TaskSpec::best_arm(), gauss(moved)).H == Approx(H / (c * c)).epsilon(1e-7));
    // Variance sigma^2 scales H by sigma^2.
    const auto v = BanditInstance(Family::gaussian(c), mu);
    REQUIRE(oracle_difficulty_sp(TaskSpec::best_arm(), v).H == Approx(H * c).epsilon(1e-7));
  }
}

TEST_CASE("best response is no worse than random alternatives") {
  oracle::Gen gen(104);
  for (int i = 0; i < 100; ++i) {
    const std::size_t K = gen.index(2, 4);
    const auto mu = gen.separated(K, 0.1, 0.9, 0.02);
    const auto inst = bern(mu);
    const Weights w(gen.simplex(K, 0.02));
    const auto br = best_response(TaskSpec::best_arm(), inst, w);
    for (int j = 0; j < 50; ++j) {
      std::vector<double> lambda(K);
      for (auto& x : lambda) x = gen.uniform(0.01, 0.99);
      if (!in_alternative_closure(TaskSpec::best_arm(), mu, lambda)) continue;
      double v = 0;
      for (std::size_t k = 0; k < K; ++k) v += w[k] * kl(Family::bernoulli(), lambda[k], mu[k]);
      REQUIRE(br.value <= v + 1e-12);
    }
  }
}

TEST_CASE("the oracle weights attain the oracle value") {
  oracle::Gen gen(105);
  for (int i = 0; i < 40; ++i) {
    const std::size_t K = gen.index(2, 6);
    const auto inst = gauss(gen.separated(K, -1, 1, 0.05));
    const auto r = oracle_difficulty_sp(TaskSpec::best_arm(), inst);
    const double w_min = r.omega_star.min();
    REQUIRE(w_min > 0.0);
    REQUIRE(sp_rate(TaskSpec::best_arm(), inst, r.omega_star) == Approx(r.H).epsilon(1e-7));
  }
}

TEST_CASE("tracking deviation stays within K") {
  oracle::Gen gen(106);
  for (int i = 0; i < 50; ++i) {
    const std::size_t K = gen.index(2, 8);
    const Weights w(gen.simplex(K, 1e-3));
    const std::size_t T = gen.index(K, 20000);
    const auto seq = tracking_sequence(w, T);
    std::vector<double> n(K, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      n[seq[t]] += 1;
      for (std::size_t k = 0; k < K; ++k) REQUIRE(std::abs(n[k] - w[k] * (t + 1)) <= K);
    }
  }
}

TEST_CASE("Monte Carlo seeds give independent-looking replications") {
  const auto task = TaskSpec::best_arm();
  const auto inst = bern({0.55, 0.45});
  const auto a = estimate_error(AlgorithmFamily::uniform(), task, inst, 50, 20000, 1);
  const auto b = estimate_error(AlgorithmFamily::uniform(), task, inst, 50, 20000, 2);
  CHECK(a.errors != b.errors);
  CHECK(std::abs(a.p_hat - b.p_hat) <= a.halfwidth() + b.halfwidth());
}
