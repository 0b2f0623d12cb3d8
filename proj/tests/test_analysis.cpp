#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "specmpc/analysis.hpp"

using namespace specmpc;

namespace {

std::vector<double> sinusoid(double amp, double freq, double fs, int n,
                             double offset = 0.0) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        offset + amp * std::sin(2.0 * std::numbers::pi * freq * i / fs);
  }
  return out;
}

PowerSpectrum synthetic_spectrum(const std::vector<double>& rel_powers) {
  PowerSpectrum s;
  s.dc_power = 1.0;
  for (std::size_t i = 0; i < rel_powers.size(); ++i) {
    s.freq_hz.push_back(static_cast<double>(i) * 100.0);
    s.power_rel.push_back(rel_powers[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("welch: tone at a bin center dominates") {
  const double fs = 100e3;
  const auto trace = sinusoid(1.0, 12.5e3, fs, 32768, 2.0);
  const PowerSpectrum spec = welch_spectrum(trace, fs, 2048, 0.5);
  std::size_t best = 1;
  for (std::size_t i = 1; i < spec.power_rel.size(); ++i) {
    if (spec.power_rel[i] > spec.power_rel[best]) best = i;
  }
  CHECK(spec.freq_hz[best] == doctest::Approx(12.5e3));
  // everything two bins away from the tone is far down
  for (std::size_t i = 1; i < spec.power_rel.size(); ++i) {
    if (i + 2 < best || i > best + 2) {
      CHECK(spec.power_rel[i] < spec.power_rel[best] * 1e-5);
    }
  }
}

TEST_CASE("welch: constant signal is DC only") {
  std::vector<double> trace(8192, 3.0);
  const PowerSpectrum spec = welch_spectrum(trace, 1e4, 1024, 0.5);
  CHECK(spec.dc_power == doctest::Approx(9.0));
  CHECK(spec.power_rel[0] == 1.0);
  for (std::size_t i = 1; i < spec.power_rel.size(); ++i) {
    CHECK(spec.power_rel[i] <= 1e-20);
  }
}

TEST_CASE("welch: seeded white +-1 sequence is flat") {
  std::mt19937 rng(12345);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> trace(1 << 18);
  for (auto& v : trace) v = coin(rng) ? 1.0 : -1.0;
  // shift so the DC reference is meaningful
  for (auto& v : trace) v += 2.0;
  const PowerSpectrum spec = welch_spectrum(trace, 1e6, 1024, 0.5);
  // averaged over ~500 segments the periodogram flattens well inside 3 dB;
  // the one-sided fold halves the unmirrored Nyquist bin, so skip it
  std::vector<double> sorted(spec.power_rel.begin() + 1,
                             spec.power_rel.end() - 1);
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t i = 1; i + 1 < spec.power_rel.size(); ++i) {
    const double db = 10.0 * std::log10(spec.power_rel[i] / median);
    CHECK(std::abs(db) <= 3.0);
  }
}

TEST_CASE("welch input validation") {
  std::vector<double> tiny(16, 1.0);
  CHECK_THROWS_AS(welch_spectrum(tiny, 1e3, 32), std::invalid_argument);
  CHECK_THROWS_AS(welch_spectrum(tiny, 1e3, 1), std::invalid_argument);
  CHECK_THROWS_AS(welch_spectrum(tiny, 1e3, 8, 1.0), std::invalid_argument);
}

TEST_CASE("parseval identity in rectangular single-segment mode") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  std::vector<double> trace(4096);
  for (auto& v : trace) v = dist(rng);

  const PowerSpectrum spec = welch_spectrum(
      trace, 1e5, static_cast<int>(trace.size()), 0.0,
      SpectralWindow::rectangular);
  double mean_square = 0.0;
  for (double v : trace) mean_square += v * v;
  mean_square /= static_cast<double>(trace.size());

  double total = 0.0;
  for (double p : spec.power_rel) total += p * spec.dc_power;
  CHECK(total == doctest::Approx(mean_square).epsilon(1e-3));
}

TEST_CASE("sfdr") {
  SUBCASE("two synthetic peaks 20 dB apart") {
    std::vector<double> p(64, 1e-9);
    p[0] = 1.0;
    p[20] = 1.0;    // 0 dB
    p[40] = 0.01;   // -20 dB
    CHECK(sfdr(synthetic_spectrum(p)) == doctest::Approx(20.0));
  }

  SUBCASE("equal peaks give 0 dB") {
    std::vector<double> p(64, 1e-9);
    p[0] = 1.0;
    p[20] = 0.5;
    p[40] = 0.5;
    CHECK(sfdr(synthetic_spectrum(p)) == doctest::Approx(0.0));
  }

  SUBCASE("featureless spectrum raises") {
    std::vector<double> p(64, 1.0);
    CHECK_THROWS(sfdr(synthetic_spectrum(p)));
    CHECK_THROWS_AS(sfdr(synthetic_spectrum({1.0, 2.0})),
                    std::invalid_argument);
  }

  SUBCASE("square wave: fundamental to third harmonic") {
    const double fs = 1e6;
    std::vector<double> trace(1 << 16);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      trace[i] = (i % 32) < 16 ? 1.0 : 0.0;  // 31.25 kHz, 50% duty
    }
    const PowerSpectrum spec =
        welch_spectrum(trace, fs, 8192, 0.0, SpectralWindow::rectangular);
    CHECK(sfdr(spec) == doctest::Approx(20.0 * std::log10(3.0)).epsilon(0.03));
  }

  SUBCASE("invariant under uniform scaling") {
    std::vector<double> p(64, 1e-9);
    p[10] = 0.8;
    p[30] = 0.2;
    const double base = sfdr(synthetic_spectrum(p));
    for (auto& v : p) v *= 1234.5;
    CHECK(sfdr(synthetic_spectrum(p)) == doctest::Approx(base));
  }
}

TEST_CASE("gap depth") {
  SUBCASE("flat spectrum has zero depth") {
    std::vector<double> p(128, 0.25);
    const PowerSpectrum s = synthetic_spectrum(p);
    const std::pair<double, double> flanks[2] = {{1000.0, 2000.0},
                                                 {8000.0, 9000.0}};
    CHECK(gap_depth(s, {4000.0, 6000.0}, flanks) == doctest::Approx(0.0));
  }

  SUBCASE("synthetic 30 dB notch reads 30 dB") {
    std::vector<double> p(128, 1.0);
    for (std::size_t i = 40; i <= 60; ++i) p[i] = 1e-3;
    const PowerSpectrum s = synthetic_spectrum(p);
    const std::pair<double, double> flanks[2] = {{2000.0, 3500.0},
                                                 {6500.0, 8000.0}};
    CHECK(gap_depth(s, {4200.0, 5800.0}, flanks) == doctest::Approx(30.0));
  }

  SUBCASE("empty bands raise") {
    std::vector<double> p(16, 1.0);
    const PowerSpectrum s = synthetic_spectrum(p);
    const std::pair<double, double> flanks[1] = {{100.0, 200.0}};
    CHECK_THROWS_AS(gap_depth(s, {1e6, 2e6}, flanks), std::invalid_argument);
    CHECK_THROWS_AS(
        gap_depth(s, {100.0, 200.0}, std::span<const std::pair<double, double>>{}),
        std::invalid_argument);
  }
}

TEST_CASE("average switching frequency") {
  SUBCASE("ideal pwm count") {
    // 1 kHz of rising edges over one second at 16 kHz sampling; the trace
    // starts low so every cycle contributes exactly one edge
    std::vector<std::int8_t> trace;
    for (int i = 0; i < 16000; ++i) trace.push_back((i % 16) >= 8 ? 1 : 0);
    CHECK(avg_switching_frequency(trace, 1.0) == doctest::Approx(1000.0));
    CHECK(rising_edge_count(trace) == 1000);
  }

  SUBCASE("constant trace has no edges") {
    std::vector<std::int8_t> trace(1000, 1);
    CHECK(avg_switching_frequency(trace, 0.5) == 0.0);
  }

  SUBCASE("toggle every k_max cycles halves twice") {
    // fc = 400 kHz, run of 10 identical outputs then toggle
    std::vector<std::int8_t> trace;
    int state = 0;
    for (int i = 0; i < 400'000; ++i) {
      if (i % 10 == 0) state ^= 1;
      trace.push_back(static_cast<std::int8_t>(state));
    }
    CHECK(avg_switching_frequency(trace, 1.0) == doctest::Approx(20e3).epsilon(1e-3));
  }

  SUBCASE("duration must be positive") {
    std::vector<std::int8_t> trace(10, 0);
    CHECK_THROWS_AS(avg_switching_frequency(trace, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("ripple statistics") {
  SUBCASE("identical traces give unit factors") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = 12.0 + 0.1 * std::sin(static_cast<double>(i));
    }
    const RippleStats r = ripple_stats(v, v, 0.2);
    CHECK(r.variance_factor == doctest::Approx(1.0));
    CHECK(r.peak_to_peak_factor == doctest::Approx(1.0));
  }

  SUBCASE("constant trace has zero ripple") {
    std::vector<double> v(1000, 5.0);
    const RippleStats r = ripple_stats(v, v, 0.2);
    CHECK(r.variance_v2 == 0.0);
    CHECK(r.peak_to_peak_v == 0.0);
  }

  SUBCASE("startup transient is discarded") {
    std::vector<double> v(1000, 1.0);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = 50.0;
    CHECK(trace_peak_to_peak(v, 0.2) == 0.0);
    CHECK(trace_peak_to_peak(v, 0.0) == doctest::Approx(49.0));
  }
}

TEST_CASE("spectrogram") {
  SUBCASE("stationary tone is a constant ridge") {
    const double fs = 100e3;
    const auto trace = sinusoid(1.0, 10e3, fs, 40960);
    const Spectrogram gram = spectrogram(trace, fs, 2048, 1024);
    REQUIRE(gram.cols > 10);
    const int tone_row = static_cast<int>(std::lround(10e3 / (fs / 2048)));
    for (int col = 0; col < gram.cols; ++col) {
      int best = 0;
      for (int row = 1; row < gram.rows; ++row) {
        if (gram.at(col, row) > gram.at(col, best)) best = row;
      }
      CHECK(best == tone_row);
    }
  }

  SUBCASE("zero trace floors at the dB floor") {
    std::vector<double> trace(8192, 0.0);
    const Spectrogram gram = spectrogram(trace, 1e5, 1024, 512);
    for (double p : gram.power) CHECK(p == 0.0);
  }

  SUBCASE("bad windows raise") {
    std::vector<double> trace(100, 0.0);
    CHECK_THROWS_AS(spectrogram(trace, 1e3, 1024, 512), std::invalid_argument);
    CHECK_THROWS_AS(spectrogram(trace, 1e3, 64, 0), std::invalid_argument);
  }
}

TEST_CASE("distortion power") {
  SUBCASE("flat unit spectrum over k bins sums to k") {
    std::vector<double> p(101, 1.0);
    const PowerSpectrum s = synthetic_spectrum(p);  // bins at 0,100,...,10000 Hz
    CHECK(distortion_power(s, {500.0, 1500.0}) == doctest::Approx(11.0));
  }

  SUBCASE("empty bands raise") {
    std::vector<double> p(16, 1.0);
    const PowerSpectrum s = synthetic_spectrum(p);
    CHECK_THROWS_AS(distortion_power(s, {200.0, 200.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(distortion_power(s, {1e6, 2e6}), std::invalid_argument);
  }

  SUBCASE("DC bin never counts") {
    std::vector<double> p(16, 1.0);
    p[0] = 1e9;
    const PowerSpectrum s = synthetic_spectrum(p);
    CHECK(distortion_power(s, {0.0, 250.0}) == doctest::Approx(2.0));
  }
}
