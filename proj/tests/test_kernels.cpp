#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "keyguess/kernels.hpp"

using namespace keyguess;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng) * std::exp(8.0 * u(rng));
  return v;
}

}  // namespace

TEST_CASE("compensated sum recovers cancelled terms") {
  CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  CHECK(s.value() == 2.0);
}

TEST_CASE("omp sum is independent of the thread count") {
  const auto v = random_values(100000, 1);
  set_thread_count(1);
  const double one = kernels::omp::sum(v.size(), [&](std::size_t i) { return v[i]; });
  set_thread_count(8);
  const double eight = kernels::omp::sum(v.size(), [&](std::size_t i) { return v[i]; });
  set_thread_count(1);
  CHECK(one == eight);
  const double serial = kernels::serial::sum(v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(std::abs(one - serial) <= 1e-12 * std::abs(serial) + 1e-9);
}

TEST_CASE("omp log-sum-exp matches the serial reference") {
  const auto v = random_values(50000, 2);
  set_thread_count(4);
  const double a = kernels::omp::log_sum_exp(v.size(), [&](std::size_t i) { return v[i] * 100; });
  set_thread_count(1);
  const double b = kernels::serial::log_sum_exp(v.size(), [&](std::size_t i) { return v[i] * 100; });
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK(kernels::omp::log_sum_exp(3, [](std::size_t) { return -INFINITY; }) == -INFINITY);
}

TEST_CASE("argmin resolves ties to the smallest index") {
  std::vector<double> v(20000, 5.0);
  v[7000] = 1.0;
  v[15000] = 1.0;
  set_thread_count(4);
  const auto a = kernels::omp::argmin(v.size(), [&](std::size_t i) { return v[i]; });
  set_thread_count(1);
  const auto b = kernels::serial::argmin(v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(a.index == 7000);
  CHECK(b.index == 7000);
  CHECK(a.value == 1.0);
}

TEST_CASE("extend forms the outer product row by row") {
  const std::vector<double> in{0.5, 0.25, 0.25};
  const auto w = [](std::size_t i, std::size_t j) { return (i + 1) * 10.0 + j; };
  set_thread_count(3);
  const auto a = kernels::omp::extend(in, 2, w);
  set_thread_count(1);
  const auto b = kernels::serial::extend(in, 2, w);
  CHECK(a == b);
  CHECK(a[3] == doctest::Approx(0.25 * 21));
}
