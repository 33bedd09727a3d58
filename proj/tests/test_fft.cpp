#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "canclab/fft.hpp"
#include "canclab/rng.hpp"

#include <vector>

using namespace canclab;
using namespace canclab::fourier;

namespace {
std::vector<cxd> random_seq(std::uint64_t seed, std::size_t n) {
  CounterRng rng(seed);
  std::vector<cxd> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cxd(2 * rng.uniform01(2 * i) - 1, 2 * rng.uniform01(2 * i + 1) - 1);
  return v;
}
}  // namespace

TEST_CASE("fft inverts itself") {
  auto v = random_seq(5, 1024);
  auto a = v;
  fft_inplace(a, false);
  fft_inplace(a, true);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(std::abs(a[i] / 1024.0 - v[i]) < 1e-12);
}

TEST_CASE("fft matches direct dft on a small case") {
  auto v = random_seq(8, 16);
  auto a = v;
  fft_inplace(a, false);
  for (std::size_t j = 0; j < 16; ++j) {
    cxd direct(0, 0);
    for (std::size_t m = 0; m < 16; ++m)
      direct += v[m] * std::polar(1.0, -kTwoPi * double(j * m) / 16.0);
    CHECK(std::abs(a[j] - direct) < 1e-12);
  }
}

TEST_CASE("fft rejects non-power-of-two sizes") {
  std::vector<cxd> v(12, cxd(1, 0));
  CHECK_THROWS_AS(fft_inplace(v, false), precondition_error);
}

TEST_CASE("cross correlation equals the double loop") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng rng(trial + 100);
    std::size_t N = 16 + rng.bits(0) % 500;
    std::size_t tau_max = rng.bits(1) % 120;
    auto a = random_seq(trial * 3 + 1, N + tau_max);
    auto b = random_seq(trial * 3 + 2, N);
    auto fast = cross_correlate(a, b, tau_max);
    auto slow = cross_correlate_naive(a, b, tau_max);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t t = 0; t <= tau_max; ++t) {
      double scale = std::max(1.0, std::abs(slow[t]));
      CHECK(std::abs(fast[t] - slow[t]) / scale < 1e-9);
    }
  }
}

TEST_CASE("cross correlation validates lengths") {
  auto a = random_seq(1, 10);
  auto b = random_seq(2, 8);
  CHECK_THROWS_AS(cross_correlate(a, b, 3), precondition_error);
  CHECK_NOTHROW(cross_correlate(a, b, 2));
}
