#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "specmpc/analysis.hpp"
#include "specmpc/pi_control.hpp"
#include "specmpc/plant.hpp"
#include "specmpc/pwm.hpp"

using namespace specmpc;

namespace {

PlantParams sim_point() {
  PlantParams p;
  p.vin_v = 48.0;
  p.inductance_h = 42e-6;
  p.capacitance_f = 5e-3;
  p.series_resistance_ohm = 0.02;
  p.load = {LoadModel::Kind::resistance, 2.4};
  p.dt_s = 1.0 / 400e3;
  return p;
}

PlantParams experiment_point() {
  PlantParams p;
  p.vin_v = 48.0;
  p.inductance_h = 22e-6;
  p.capacitance_f = 15e-6;
  p.series_resistance_ohm = 0.05;
  p.load = {LoadModel::Kind::current_sink, 5.0};
  p.dt_s = 1.0 / 125e3;
  return p;
}

}  // namespace

TEST_CASE("plant parameter validation") {
  PlantParams p = sim_point();
  CHECK_NOTHROW(p.validate());
  p.inductance_h = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = sim_point();
  p.load = {LoadModel::Kind::resistance, 0.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("held-switch equilibria are fixed points") {
  for (const PlantParams& p : {sim_point(), experiment_point()}) {
    const BuckDiscretization disc(p);
    for (int u = 0; u <= 1; ++u) {
      const PlantState eq = disc.equilibrium(u);
      const PlantState next = disc.step(eq, u);
      CHECK(std::abs(next.inductor_a - eq.inductor_a) <= 1e-9);
      CHECK(std::abs(next.capacitor_v - eq.capacitor_v) <= 1e-9);
    }
  }
}

TEST_CASE("zero state with zero input stays at zero") {
  PlantParams p = sim_point();
  const BuckDiscretization disc(p);
  const PlantState next = disc.step(PlantState{0.0, 0.0}, 0);
  CHECK(std::abs(next.inductor_a) <= 1e-15);
  CHECK(std::abs(next.capacitor_v) <= 1e-15);
}

TEST_CASE("exact discretization matches the sub-stepped integrator") {
  std::mt19937 rng(101);
  std::bernoulli_distribution coin(0.5);
  for (const PlantParams& p : {sim_point(), experiment_point()}) {
    const BuckDiscretization disc(p);
    PlantState exact{p.load.kind == LoadModel::Kind::current_sink
                         ? p.load.value
                         : 5.0,
                     12.0};
    PlantState stepped = exact;
    double worst_i = 0.0, worst_v = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const int u = coin(rng) ? 1 : 0;
      exact = disc.step(exact, u);
      stepped = oracle::substep_plant(stepped, u, p, 1000);
      worst_i = std::max(worst_i, std::abs(exact.inductor_a - stepped.inductor_a));
      worst_v =
          std::max(worst_v, std::abs(exact.capacitor_v - stepped.capacitor_v));
    }
    CHECK(worst_i < 1e-6);
    CHECK(worst_v < 1e-6);
  }
}

TEST_CASE("sub-stepped oracle converges at fourth order") {
  const PlantParams p = experiment_point();
  const BuckDiscretization disc(p);
  const PlantState x0{3.0, 10.0};
  const PlantState ref = disc.step(x0, 1);

  auto err = [&](int substeps) {
    const PlantState got = oracle::substep_plant(x0, 1, p, substeps);
    return std::hypot(got.inductor_a - ref.inductor_a,
                      got.capacitor_v - ref.capacitor_v);
  };
  const double e1 = err(2);
  const double e2 = err(4);
  const double e3 = err(8);
  const double slope1 = std::log2(e1 / e2);
  const double slope2 = std::log2(e2 / e3);
  CHECK(slope1 == doctest::Approx(4.0).epsilon(0.125));
  CHECK(slope2 == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("advance composes over subintervals") {
  const PlantParams p = sim_point();
  const BuckDiscretization disc(p);
  const PlantState x0{4.0, 11.0};
  const PlantState whole = disc.advance(x0, 1, p.dt_s);
  const PlantState split =
      disc.advance(disc.advance(x0, 1, 0.3 * p.dt_s), 1, 0.7 * p.dt_s);
  CHECK(whole.inductor_a == doctest::Approx(split.inductor_a).epsilon(1e-12));
  CHECK(whole.capacitor_v == doctest::Approx(split.capacitor_v).epsilon(1e-12));
  // advance(dt) must agree with the cached full-period transition
  const PlantState cached = disc.step(x0, 1);
  CHECK(whole.inductor_a == doctest::Approx(cached.inductor_a).epsilon(1e-14));
  CHECK(whole.capacitor_v == doctest::Approx(cached.capacitor_v).epsilon(1e-14));
}

TEST_CASE("energy balance with a resistive load") {
  const PlantParams p = sim_point();
  const BuckDiscretization disc(p);
  // 25% duty pattern; let the pattern reach its periodic steady state first
  PlantState x{5.0, 12.0};
  for (int k = 0; k < 40'000; ++k) x = disc.step(x, k % 4 == 0 ? 1 : 0);

  double in_energy = 0.0, out_energy = 0.0;
  for (int k = 0; k < 40'000; ++k) {
    const int u = k % 4 == 0 ? 1 : 0;
    const PlantState next = disc.step(x, u);
    // trapezoid over one period; input power flows only while the
    // high-side switch conducts
    in_energy +=
        u * p.vin_v * 0.5 * (x.inductor_a + next.inductor_a) * p.dt_s;
    out_energy += 0.5 *
                  (x.capacitor_v * x.capacitor_v +
                   next.capacitor_v * next.capacitor_v) /
                  p.load.value * p.dt_s;
    x = next;
  }
  CHECK(in_energy >= out_energy * (1.0 - 1e-3));
  // the series resistance dissipates, so input must strictly exceed output
  CHECK(in_energy > out_energy);
}

TEST_CASE("pi controller") {
  SUBCASE("zero error returns the clamped bias") {
    PiParams params;
    params.kp = 0.02;
    params.ki = 10.0;
    params.bias = 0.25;
    params.dt_s = 1.0 / 400e3;
    PiController pi(params);
    CHECK(pi.step(12.0, 12.0) == doctest::Approx(0.25));
  }

  SUBCASE("output saturates and the integrator stays clamped") {
    PiParams params;
    params.kp = 1.0;
    params.ki = 1e5;
    params.bias = 0.25;
    params.dt_s = 1e-5;
    PiController pi(params);
    for (int i = 0; i < 1000; ++i) {
      const double out = pi.step(12.0, 0.0);  // persistent large error
      CHECK(out <= 1.0);
      CHECK(out >= 0.0);
    }
    CHECK(pi.integrator() <= 1.0 - params.bias + 1e-12);
    // recovery must not fight a wound-up integrator
    double out = 1.0;
    for (int i = 0; i < 2000 && out >= 1.0; ++i) out = pi.step(12.0, 14.0);
    CHECK(out < 1.0);
  }

  SUBCASE("designed loop settles on the first-order lag model") {
    const double fc = 400e3;
    const PlantParams plant = sim_point();
    const PiParams params = design_pi(fc, plant, 12.0);
    PiController pi(params);
    // the spectral loop modeled as a lag with tau = 5/(2*pi*fc), the power
    // stage as its dc gain
    const double tau = 5.0 / (2.0 * std::numbers::pi * fc);
    const double alpha = params.dt_s / (tau + params.dt_s);
    double duty_filtered = 0.0;
    double vc = 0.0;
    int settled_at = -1;
    const int steps = static_cast<int>(0.5 * fc);  // 500 ms
    for (int k = 0; k < steps; ++k) {
      const double duty = pi.step(12.0, vc);
      duty_filtered += alpha * (duty - duty_filtered);
      vc = duty_filtered * plant.vin_v;
      if (settled_at < 0 && std::abs(vc - 12.0) <= 0.12) settled_at = k;
      if (settled_at >= 0 && std::abs(vc - 12.0) > 0.12) settled_at = -1;
    }
    REQUIRE(settled_at >= 0);
    CHECK(settled_at <= steps / 2);
    CHECK(vc == doctest::Approx(12.0).epsilon(0.001));
  }

  SUBCASE("preload makes the start bumpless") {
    PiParams params;
    params.kp = 0.01;
    params.ki = 5.0;
    params.bias = 0.25;
    params.dt_s = 1e-5;
    PiController pi(params);
    pi.preload(0.3);
    CHECK(pi.step(12.0, 12.0) == doctest::Approx(0.3));
  }
}

TEST_CASE("pwm baseline") {
  const PlantParams p = sim_point();
  const BuckDiscretization disc(p);

  SUBCASE("zero duty yields a constant-0 trace") {
    PwmParams params{0.0, 75e3, 0.001, 16, 400e3};
    const PwmRun run = pwm_baseline(params, disc, PlantState{0.0, 0.0});
    REQUIRE(run.switch_trace.size() == 6400);
    for (auto s : run.switch_trace) CHECK(s == 0);
  }

  SUBCASE("duty 0.25 puts the fundamental at f_pwm") {
    PwmParams params{0.25, 75e3, 0.05, 16, 400e3};
    const PwmRun run =
        pwm_baseline(params, disc, PlantState{5.0, 12.0});
    std::vector<double> trace(run.switch_trace.begin(),
                              run.switch_trace.end());
    const PowerSpectrum spec =
        welch_spectrum(trace, run.sample_hz, 8192, 0.5, SpectralWindow::hann);
    // strongest non-DC bin sits on the fundamental
    std::size_t best = 1;
    for (std::size_t i = 1; i < spec.power_rel.size(); ++i) {
      if (spec.power_rel[i] > spec.power_rel[best]) best = i;
    }
    CHECK(spec.freq_hz[best] == doctest::Approx(75e3).epsilon(0.01));
    // duty cycle shows up as the trace mean
    double mean = 0.0;
    for (double v : trace) mean += v;
    mean /= static_cast<double>(trace.size());
    CHECK(mean == doctest::Approx(0.25).epsilon(0.01));
  }

  SUBCASE("symmetric square wave has no even harmonics") {
    // grid-aligned period: fs / f_pwm = 32 samples exactly
    PwmParams params{0.5, 200e3, 0.02, 16, 400e3};
    const PwmRun run = pwm_baseline(params, disc, PlantState{5.0, 12.0});
    std::vector<double> trace(run.switch_trace.begin(),
                              run.switch_trace.end());
    const PowerSpectrum spec = welch_spectrum(trace, run.sample_hz, 4096, 0.0,
                                              SpectralWindow::rectangular);
    const double bin_hz = spec.bin_hz();
    auto power_at = [&](double f) {
      return spec.power_rel[static_cast<std::size_t>(std::lround(f / bin_hz))];
    };
    const double fundamental = power_at(200e3);
    const double third = power_at(600e3);
    CHECK(10.0 * std::log10(fundamental / third) ==
          doctest::Approx(20.0 * std::log10(3.0)).epsilon(0.03));
    for (int h = 2; h <= 6; h += 2) {
      const double even = power_at(200e3 * h);
      CHECK(10.0 * std::log10(even / fundamental) < -60.0);
    }
  }

  SUBCASE("plant ripple is periodic at the pwm period") {
    PwmParams params{0.25, 80e3, 0.02, 16, 400e3};
    const BuckDiscretization d2(sim_point());
    const PwmRun run = pwm_baseline(params, d2, d2.equilibrium(0));
    // exactly 80 grid samples per period: compare late-cycle waveforms
    const std::size_t period = 80;
    const std::size_t tail = run.vc_trace.size() - 10 * period;
    for (std::size_t i = 0; i < period; ++i) {
      CHECK(run.vc_trace[tail + i] ==
            doctest::Approx(run.vc_trace[tail + i + period]).epsilon(1e-3));
    }
  }

  SUBCASE("nyquist guard rejects a too-fast carrier") {
    PwmParams params{0.5, 3.3e6, 0.001, 16, 400e3};
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  }
}
