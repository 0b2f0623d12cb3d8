#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <random>

#include "oracle.hpp"
#include "specmpc/sliding_spectrum.hpp"

using namespace specmpc;

namespace {

double max_bin_error(const SpectrumState& spectrum,
                     const std::vector<std::complex<double>>& reference) {
  double worst = 0.0;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    worst = std::max(worst, std::abs(spectrum.bins[n] - reference[n]));
  }
  return worst;
}

}  // namespace

TEST_CASE("engine config validation") {
  EngineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.window_samples = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.window_samples = 2048;
  cfg.control_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.control_hz = 400e3;
  cfg.resync_interval = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(EngineConfig{2048, 400e3, 1}.bin_hz() == doctest::Approx(195.3125));
  CHECK(EngineConfig{2047, 125e3, 1}.stored_bins() == 1024);
}

TEST_CASE("shift vector twiddles") {
  CHECK_THROWS_AS(ShiftVector(1), std::invalid_argument);

  ShiftVector small(4);
  CHECK(small.twiddle(0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(small.twiddle(1) - std::complex<double>(0.0, 1.0)) <= 1e-12);

  ShiftVector big(2048);
  CHECK(std::abs(big.twiddle(512) - std::complex<double>(0.0, 1.0)) <= 1e-12);
  for (int q = 0; q < 2048; ++q) {
    CHECK(std::abs(std::abs(big.twiddle(q)) - 1.0) <= 1e-12);
  }
}

TEST_CASE("dc shift of the switch states") {
  CHECK(shifted_value(1, 12.0 / 48.0) == doctest::Approx(0.75));
  CHECK(shifted_value(0, 12.0 / 48.0) == doctest::Approx(-0.25));
  CHECK(shifted_value(0, 0.0) == 0.0);
  // out-of-range references clamp instead of propagating
  CHECK(shifted_value(0, 1.5) == doctest::Approx(-1.0));
  CHECK(shifted_value(1, -0.25) == doctest::Approx(1.0));
}

TEST_CASE("window transition bookkeeping matches recount") {
  const int n = 37;
  SwitchingWindow window(n);
  std::mt19937 rng(7);
  std::bernoulli_distribution coin(0.4);
  for (int i = 0; i < 5 * n; ++i) {
    const int bit = coin(rng) ? 1 : 0;
    window.push(bit, shifted_value(bit, 0.25));
    const int expected = oracle::recount_transitions(window.raw_chronological());
    REQUIRE(window.transition_count() == expected);
    REQUIRE(window.transition_count() >= 0);
    REQUIRE(window.transition_count() <= n - 1);
  }
}

TEST_CASE("slide on the all-zero window") {
  const int n = 16;
  ShiftVector shift(n);
  SpectrumState spectrum(n);

  SUBCASE("inserting zero keeps every bin at zero") {
    slide(spectrum, shift, 0.0, 0.0);
    for (const auto& b : spectrum.bins) CHECK(b == std::complex<double>{});
    CHECK(spectrum.age == 1);
  }

  SUBCASE("first nonzero sample lands rotated on every bin") {
    const double v = 0.75;
    slide(spectrum, shift, 0.0, v);
    for (int q = 0; q < spectrum.bin_count(); ++q) {
      CHECK(std::abs(spectrum.bins[static_cast<std::size_t>(q)] -
                     v * shift.twiddle(q)) <= 1e-15);
    }
  }
}

TEST_CASE("10k random slides track the direct transform") {
  const int n = 64;
  ShiftVector shift(n);
  SwitchingWindow window(n);
  SpectrumState spectrum(n);
  std::mt19937 rng(11);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> duty(0.1, 0.9);

  const double d = duty(rng);
  for (int i = 0; i < 10'000; ++i) {
    const int bit = coin(rng) ? 1 : 0;
    const double v = shifted_value(bit, d);
    slide(spectrum, shift, window.oldest_shifted(), v);
    window.push(bit, v);
  }
  CHECK(max_bin_error(spectrum, oracle::direct_dft(window)) < 1e-9);
  CHECK(spectrum.age == 10'000);
}

TEST_CASE("resync recomputes the window spectrum directly") {
  SUBCASE("all-zero window") {
    SwitchingWindow window(16);
    const SpectrumState s = resync(window, ShiftVector(16));
    for (const auto& b : s.bins) CHECK(std::abs(b) == 0.0);
    CHECK(s.age == 0);
  }

  SUBCASE("constant window is DC only") {
    const int n = 32;
    const double c = -0.25;
    SwitchingWindow window(n);
    for (int i = 0; i < n; ++i) window.push(0, c);
    const SpectrumState s = resync(window, ShiftVector(n));
    CHECK(std::abs(s.bins[0] - std::complex<double>(n * c, 0.0)) <= 1e-9);
    for (int q = 1; q < s.bin_count(); ++q) {
      CHECK(std::abs(s.bins[static_cast<std::size_t>(q)]) <= 1e-9);
    }
  }

  SUBCASE("random window matches the quadratic-time oracle") {
    const int n = 16;
    SwitchingWindow window(n);
    std::mt19937 rng(3);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < n; ++i) {
      const int bit = coin(rng) ? 1 : 0;
      window.push(bit, bit ? 1.0 : -1.0);
    }
    const SpectrumState s = resync(window, ShiftVector(n));
    const auto ref = oracle::direct_dft(window);
    for (std::size_t q = 0; q < ref.size(); ++q) {
      CHECK(std::abs(std::abs(s.bins[q]) - std::abs(ref[q])) <= 1e-10);
    }
  }

  SUBCASE("bin 0 equals the window sum") {
    const int n = 64;
    SwitchingWindow window(n);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = dist(rng);
      window.push(0, v);
      sum += v;
    }
    const SpectrumState s = resync(window, ShiftVector(n));
    CHECK(std::abs(s.bins[0] - std::complex<double>(sum, 0.0)) <= 1e-10 * n);
  }
}

TEST_CASE("cloned spectra slid identically stay bit-identical") {
  const int n = 48;
  ShiftVector shift(n);
  SpectrumState a(n);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < n; ++i) slide(a, shift, 0.0, dist(rng));

  SpectrumState b = a;  // branch
  for (int i = 0; i < 100; ++i) {
    const double oldest = dist(rng);
    const double fresh = dist(rng);
    slide(a, shift, oldest, fresh);
    slide(b, shift, oldest, fresh);
  }
  CHECK(std::memcmp(a.bins.data(), b.bins.data(),
                    a.bins.size() * sizeof(a.bins[0])) == 0);
  CHECK(a.age == b.age);
}

TEST_CASE("slide is linear in the window contents") {
  const int n = 16;
  ShiftVector shift(n);
  SpectrumState sum(n), half1(n), half2(n);
  std::mt19937 rng(31);
  // dyadic values keep every addition exact in binary floating point
  std::uniform_int_distribution<int> grid(-8, 8);
  for (int i = 0; i < 200; ++i) {
    const double a = grid(rng) / 8.0;
    const double b = grid(rng) / 8.0;
    slide(sum, shift, 0.0, a + b);
    slide(half1, shift, 0.0, a);
    slide(half2, shift, 0.0, b);
  }
  for (int q = 0; q < sum.bin_count(); ++q) {
    const auto combined = half1.bins[static_cast<std::size_t>(q)] +
                          half2.bins[static_cast<std::size_t>(q)];
    CHECK(std::abs(sum.bins[static_cast<std::size_t>(q)] - combined) <= 1e-12);
  }
}

TEST_CASE("slide_into equals copy plus in-place slide") {
  const int n = 32;
  ShiftVector shift(n);
  SpectrumState src(n), dst(n);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int i = 0; i < 40; ++i) slide(src, shift, 0.0, dist(rng));

  slide_into(src, dst, shift, 0.25, -0.5);
  SpectrumState manual = src;
  slide(manual, shift, 0.25, -0.5);
  CHECK(std::memcmp(dst.bins.data(), manual.bins.data(),
                    dst.bins.size() * sizeof(dst.bins[0])) == 0);
  CHECK(dst.age == src.age + 1);
}
