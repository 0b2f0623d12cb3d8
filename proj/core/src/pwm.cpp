#include "specmpc/pwm.hpp"

#include <cmath>
#include <stdexcept>

namespace specmpc {

void PwmParams::validate() const {
  if (!(duty >= 0.0 && duty <= 1.0)) {
    throw std::invalid_argument("PwmParams: duty must be in [0,1]");
  }
  if (!(f_pwm_hz > 0.0) || !(control_hz > 0.0)) {
    throw std::invalid_argument("PwmParams: frequencies must be positive");
  }
  if (oversample < 1) {
    throw std::invalid_argument("PwmParams: oversample must be >= 1");
  }
  if (f_pwm_hz >= oversample * control_hz / 2.0) {
    throw std::invalid_argument(
        "PwmParams: f_pwm must stay below half the grid rate");
  }
  if (duration_s < 0.0) {
    throw std::invalid_argument("PwmParams: duration must be >= 0");
  }
}

PwmRun pwm_baseline(const PwmParams& params, const BuckDiscretization& disc,
                    PlantState initial) {
  params.validate();
  PwmRun run;
  run.sample_hz = params.oversample * params.control_hz;
  const double dt_grid = 1.0 / run.sample_hz;
  const auto n = static_cast<std::int64_t>(
      std::llround(params.duration_s * run.sample_hz));
  run.switch_trace.reserve(static_cast<std::size_t>(n));
  run.vc_trace.reserve(static_cast<std::size_t>(n));
  run.il_trace.reserve(static_cast<std::size_t>(n));

  const double period = 1.0 / params.f_pwm_hz;
  const bool has_edges = params.duty > 0.0 && params.duty < 1.0;
  // edge j: even = rising at (j/2)*T, odd = falling at (j/2 + duty)*T
  auto edge_time = [&](std::int64_t j) {
    return (static_cast<double>(j / 2) + (j % 2 != 0 ? params.duty : 0.0)) *
           period;
  };

  PlantState x = initial;
  int cur = params.duty > 0.0 ? 1 : 0;  // rising edge at t = 0 already applied
  std::int64_t j = 1;

  for (std::int64_t i = 0; i < n; ++i) {
    const double t0 = static_cast<double>(i) * dt_grid;
    const double t1 = static_cast<double>(i + 1) * dt_grid;
    if (has_edges) {
      while (edge_time(j) <= t0) {
        cur ^= 1;
        ++j;
      }
    }
    run.switch_trace.push_back(static_cast<std::int8_t>(cur));
    run.vc_trace.push_back(x.capacitor_v);
    run.il_trace.push_back(x.inductor_a);

    double t = t0;
    if (has_edges) {
      while (edge_time(j) < t1) {
        const double te = edge_time(j);
        x = disc.advance(x, cur, te - t);
        t = te;
        cur ^= 1;
        ++j;
      }
    }
    x = disc.advance(x, cur, t1 - t);
  }
  return run;
}

}  // namespace specmpc
