#pragma once

#include <cstdint>
#include <vector>

#include "specmpc/plant.hpp"

namespace specmpc {

struct PwmParams {
  double duty = 0.5;
  double f_pwm_hz = 75e3;
  double duration_s = 0.1;
  int oversample = 16;      ///< grid rate relative to the control frequency
  double control_hz = 400e3;

  void validate() const;
};

struct PwmRun {
  double sample_hz = 0.0;
  std::vector<std::int8_t> switch_trace;  ///< sampled on the oversampled grid
  std::vector<double> vc_trace;
  std::vector<double> il_trace;
};

/// Fixed-frequency trailing-edge PWM reference: high from each period start
/// until duty*T. The switch trace is sampled on a grid of
/// oversample * control_hz so edge quantization stays far above the band of
/// interest, while the plant is integrated exactly between true edge times.
PwmRun pwm_baseline(const PwmParams& params, const BuckDiscretization& disc,
                    PlantState initial);

}  // namespace specmpc
