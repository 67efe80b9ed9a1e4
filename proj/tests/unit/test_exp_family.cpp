#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "budgetid/exp_family.hpp"
#include "budgetid/rng.hpp"
#include "doctest.h"
#include "generators.hpp"
#include "grid_minimizer.hpp"

using namespace budgetid;
using doctest::Approx;

TEST_CASE("kl values") {
  CHECK(kl(Family::bernoulli(), 0.5, 0.5) == 0.0);
  CHECK(kl(Family::gaussian(), 1.0, 0.0) == 0.5);
  CHECK(kl(Family::gaussian(4.0), 1.0, 0.0) == 0.125);
  // 50-digit reference: 0.14384103622589046371960950...
  CHECK(kl(Family::bernoulli(), 0.5, 0.25) == Approx(0.14384103622589046).epsilon(1e-15));
}

TEST_CASE("kl on the closure of the first argument") {
  CHECK(kl(Family::bernoulli(), 0.0, 0.25) == Approx(-std::log(0.75)).epsilon(1e-15));
  CHECK(kl(Family::bernoulli(), 1.0, 0.25) == Approx(-std::log(0.25)).epsilon(1e-15));
}

TEST_CASE("kl tiny arguments stay accurate") {
  // x log(x/y) + (1-x) log((1-x)/(1-y)) with x = 1e-12, y = 2e-12 is about 3.07e-13.
  const double x = 1e-12;
  const double y = 2e-12;
  const double expected = x * std::log(0.5) + (y - x) - 0.5 * (y * y - x * x);
  CHECK(kl(Family::bernoulli(), x, y) == Approx(expected).epsilon(1e-9));
}

TEST_CASE("kl rejects values outside the domain") {
  CHECK_THROWS_AS(kl(Family::bernoulli(), 0.5, 1.0), Error);
  CHECK_THROWS_AS(kl(Family::bernoulli(), 1.5, 0.5), Error);
  CHECK_THROWS_AS(kl(Family::gaussian(), INFINITY, 0.0), Error);
  CHECK_THROWS_AS(Family::gaussian(0.0), Error);
  CHECK_THROWS_AS(Family::gaussian(-1.0), Error);
}

TEST_CASE("natural parameters") {
  CHECK(phi_prime(Family::bernoulli(), 0.0) == 0.5);
  oracle::Gen gen(11);
  for (int i = 0; i < 100; ++i) {
    const double mu = gen.uniform(-5, 5);
    CHECK(natural_of_mean(Family::gaussian(), mu) == mu);
    const double t = gen.uniform(0.0, 0.499);
    CHECK(natural_of_mean(Family::bernoulli(), 0.5 + t) ==
          Approx(-natural_of_mean(Family::bernoulli(), 0.5 - t)).epsilon(1e-12));
    const double p = gen.uniform(1e-6, 1 - 1e-6);
    CHECK(mean_of_natural(Family::bernoulli(), natural_of_mean(Family::bernoulli(), p)) ==
          Approx(p).epsilon(1e-12));
    CHECK(phi_prime_inv(Family::bernoulli(), phi_prime(Family::bernoulli(), mu)) == Approx(mu).epsilon(1e-10));
  }
}

TEST_CASE("bregman divergence") {
  oracle::Gen gen(12);
  for (int i = 0; i < 200; ++i) {
    const double a = gen.uniform(-4, 4);
    const double b = gen.uniform(-4, 4);
    CHECK(bregman(Family::gaussian(), a, a) == 0.0);
    CHECK(bregman(Family::bernoulli(), a, a) == Approx(0.0));
    CHECK(bregman(Family::gaussian(), a, b) == Approx((a - b) * (a - b) / 2).epsilon(1e-12));
    const double x = gen.uniform(0.01, 0.99);
    const double y = gen.uniform(0.01, 0.99);
    const Family f = Family::bernoulli();
    CHECK(bregman(f, natural_of_mean(f, y), natural_of_mean(f, x)) == Approx(oracle::bernoulli_kl(x, y)).epsilon(1e-10));
  }
}

TEST_CASE("sampling") {
  SUBCASE("near-one Bernoulli") {
    Philox4x32 rng(5, 0);
    int ones = 0;
    for (int i = 0; i < 1000; ++i) ones += sample(Family::bernoulli(), 1 - 1e-12, rng) == 1.0;
    CHECK(ones == 1000);
  }
  SUBCASE("Gaussian sample mean") {
    Philox4x32 rng(6, 0);
    double s = 0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) s += sample(Family::gaussian(), 0.0, rng);
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(double(n)));
  }
  SUBCASE("fixed state gives identical streams") {
    Philox4x32 a(42, 9);
    Philox4x32 b(42, 9);
    for (int i = 0; i < 1000; ++i) {
      const double x = sample(Family::gaussian(2.0), 1.0, a);
      const double y = sample(Family::gaussian(2.0), 1.0, b);
      REQUIRE(std::memcmp(&x, &y, sizeof x) == 0);
    }
  }
}

TEST_CASE("Philox4x32-10 known answers") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Philox streams differ and doubles are in range") {
  Philox4x32 a(1, 0);
  Philox4x32 b(1, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  CHECK(equal == 0);
  Philox4x32 c(3, 3);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform01();
    const double v = c.uniform01_open_low();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
  }
}
