#include <doctest.h>

#include <cmath>
#include <random>

#include "keyguess/compression.hpp"
#include "keyguess/errors.hpp"
#include "keyguess/guessing.hpp"
#include "oracles.hpp"

using namespace keyguess;
using doctest::Approx;

namespace {
const std::vector<double> kP2{0.64, 0.16, 0.16, 0.04};
const double kLn2 = std::log(2.0);
}  // namespace

TEST_CASE("top set examples") {
  const auto all = top_set(std::vector<double>{0.8, 0.2}, 1, 1.0, 1.0);
  CHECK(all.mass_complement == 0.0);
  CHECK(all.top_indices.size() == 2);
  const auto s = top_set(kP2, 2, 0.3, 1.0);
  CHECK(s.m == 1);
  CHECK(s.mass == Approx(0.64));
  CHECK(s.mass_complement == Approx(0.36));
  CHECK(s.mass + s.mass_complement == Approx(1.0).epsilon(1e-12));
  const auto u = top_set(std::vector<double>(4, 0.25), 2, 0.6, 1.0);
  CHECK(u.m == 3);
  CHECK(u.mass == Approx(0.75));
  CHECK(top_set_size(1, std::log(4.0)) == 4);
}

TEST_CASE("relaxed optimum limits") {
  std::mt19937_64 rng(41);
  const auto p = oracle::random_pmf(rng, 8);
  const auto big = relaxed_optimum(p, 1, 1.5, 50.0);
  CHECK(big.value == Approx(1.5 * oracle::renyi(p, 1 / 2.5)).epsilon(1e-12));
  CHECK(big.active_set_size == 8);
  CHECK(big.kraft == Approx(1.0));
  const auto tiny = relaxed_optimum(p, 1, 1.0, 1e-6);
  CHECK(tiny.value >= 0.0);
  CHECK(tiny.value <= 1e-6);
  CHECK(tiny.active_set_size == 1);
}

TEST_CASE("relaxed optimum matches the direct prefix minimum") {
  const auto r = relaxed_optimum(kP2, 2, 1.0, 0.3);
  CHECK(r.value == Approx(oracle::relaxed_prefix_min(kP2, 2, 1.0, 0.3)).epsilon(1e-12));
  CHECK(r.active_set_size == 1);
  CHECK(r.slack == Approx(kLn2 / 2));
  std::mt19937_64 rng(43);
  for (int t = 0; t < 100; ++t) {
    const auto p = oracle::random_pmf(rng, 1 + rng() % 40);
    const unsigned n = 1 + rng() % 4;
    const double rho = 0.2 + (rng() % 30) / 10.0;
    const double rate = 0.05 + (rng() % 100) / 50.0;
    const auto o = relaxed_optimum(p, n, rho, rate);
    CHECK(o.value == Approx(oracle::relaxed_prefix_min(p, n, rho, rate)).epsilon(1e-11));
    CHECK(o.kraft <= 1.0 + 1e-9);
    CHECK(o.clamp_moves == 0);
    for (double l : o.lengths)
      if (std::isfinite(l)) CHECK(l <= n * rate + 1e-12);
    // a fixed top-set size is never better than the free search
    CHECK(o.value <= fixed_set_kernel(p, n, rho, rate) + 1e-12);
  }
}

TEST_CASE("integer brute force matches unpruned enumeration") {
  CHECK(integer_bruteforce(std::vector<double>{0.5, 0.5}, 1.0, kLn2, 1).value == Approx(kLn2));
  const auto single = integer_bruteforce(std::vector<double>{1.0}, 2.0, 0.2, 3);
  CHECK(single.value == Approx(std::min(2.0 * kLn2, 2.0 * 3 * 0.2) / 3));
  std::mt19937_64 rng(47);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n_str = 1 + rng() % 5;
    const auto p = oracle::random_pmf(rng, n_str);
    const unsigned n = 1 + rng() % 2;
    const double rho = 0.3 + (rng() % 20) / 10.0;
    const double rate = 0.1 + (rng() % 40) / 20.0;
    const auto io = integer_bruteforce(p, rho, rate, n);
    CHECK(io.value == Approx(oracle::integer_optimum(p, rho, rate, n, 10)).epsilon(1e-12));
    CHECK(kraft_sum(io.lengths) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(integer_bruteforce(std::vector<double>(11, 1.0 / 11), 1.0, 0.5, 1), SizeError);
}

TEST_CASE("integer optimum lies within one bit of the relaxed optimum") {
  const std::vector<double> p{0.7, 0.2, 0.1};
  const double relaxed = relaxed_optimum(p, 1, 1.0, 0.5).value;
  const double v = integer_bruteforce(p, 1.0, 0.5, 1).value;
  CHECK(relaxed <= v + 1e-12);
  CHECK(v <= relaxed + kLn2 + 1e-12);
}

TEST_CASE("error and correct-decoding terms") {
  CHECK(error_term(std::vector<double>{0.8, 0.2}, 1, 1.0) == -INFINITY);
  CHECK(error_term(std::vector<double>{0.8, 0.2}, 1, 0.5) == Approx(std::log(0.2)));
  const std::vector<double> u(8, 0.125);
  CHECK(error_term(u, 1, 1.2) == Approx(std::log(1.0 - 3.0 / 8)));
  CHECK(correct_decoding_term(kP2, 2, 1.0, 0.3) == Approx(std::log(0.8)));
  CHECK(correct_decoding_term(kP2, 2, 1e-9, 0.3) == Approx(std::log(0.64) / 2).epsilon(1e-8));
  CHECK(correct_decoding_term(kP2, 2, 1.0, 5.0) == Approx(oracle::renyi(kP2, 0.5) / 2));
}

TEST_CASE("correct-decoding term grows with the rate") {
  std::mt19937_64 rng(53);
  const auto p = oracle::random_pmf(rng, 64);
  double prev = -INFINITY;
  for (int i = 1; i <= 50; ++i) {
    const double v = correct_decoding_term(p, 2, 1.0, i * 0.05);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("lower and upper bounds") {
  const std::vector<double> p{0.8, 0.2};
  const auto lo = lower_bound_finite(p, 1, 1.0, 1.0);
  CHECK(lo.value == Approx(correct_decoding_term(p, 1, 1.0, 1.0)));
  const std::vector<double> near_uniform{0.26, 0.25, 0.25, 0.24};
  const auto small = lower_bound_finite(near_uniform, 1, 1.0, 0.05);
  CHECK(small.value == Approx(0.05 + error_term(near_uniform, 1, 0.05)));

  const auto up_full = upper_bound_finite(p, 1, 1.0, 10.0);
  CHECK(up_full.value == Approx(oracle::renyi(p, 0.5) + kLn2).epsilon(1e-12));
  const auto up_low = upper_bound_finite(p, 1, 1.0, 0.01);
  CHECK(up_low.value == Approx(0.01 + kLn2).epsilon(1e-12));
  CHECK(up_full.slack == Approx(kLn2));
}

TEST_CASE("bound sandwich on random instances") {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 200; ++t) {
    const auto p = oracle::random_pmf(rng, 2 + rng() % 60);
    const unsigned n = 1 + rng() % 3;
    const double rho = 0.2 + (rng() % 30) / 10.0;
    const double rate = 0.05 + (rng() % 60) / 20.0;
    const auto lo = lower_bound_finite(p, n, rho, rate);
    const auto up = upper_bound_finite(p, n, rho, rate);
    const double mid = relaxed_optimum(p, n, rho, rate).value;
    CHECK(lo.value - lo.slack <= mid + 1e-12);
    CHECK(mid <= up.value + 1e-12);
  }
}

TEST_CASE("saturated optimum is nondecreasing in rate and rho") {
  std::mt19937_64 rng(61);
  const auto p = oracle::random_pmf(rng, 32);
  double prev = -INFINITY;
  for (int i = 1; i <= 40; ++i) {
    const double v = relaxed_optimum(p, 2, 1.0, i * 0.05).value;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  prev = -INFINITY;
  for (int i = 1; i <= 40; ++i) {
    const double v = relaxed_optimum(p, 2, i * 0.1, 0.7).value;
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("binary-split variational supremum") {
  // sup over F in [0,1] of F a + (1-F) b - D(F || F_X) = ln{F_X e^a + (1-F_X) e^b}
  std::mt19937_64 rng(67);
  for (int t = 0; t < 20; ++t) {
    const auto p = oracle::random_pmf(rng, 16);
    const unsigned n = 1;
    const double rho = 1.0, rate = 0.5 + 0.1 * (t % 10);
    const auto s = top_set(p, n, rate, rho);
    if (s.mass_complement <= 0) continue;
    std::vector<double> cond;
    for (std::size_t i : s.top_indices) cond.push_back(p[i] / s.mass);
    const double a = rho * oracle::renyi(cond, 1 / (1 + rho));
    const double b = rho * n * rate;
    double best = -INFINITY;
    for (int i = 0; i <= 200000; ++i) {
      const double f = i / 200000.0;
      const double d = oracle::divergence({f, 1 - f}, {s.mass, s.mass_complement});
      best = std::max(best, f * a + (1 - f) * b - d);
    }
    const double closed = std::log(s.mass_complement * std::exp(n * rate * rho) +
                                   std::pow(s.tilted_sum, 1 + rho));
    CHECK(best == Approx(closed).epsilon(1e-6));
  }
}
