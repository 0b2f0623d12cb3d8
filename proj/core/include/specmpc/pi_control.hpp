#pragma once

#include "specmpc/plant.hpp"

namespace specmpc {

struct PiParams {
  double kp = 0.0;
  double ki = 0.0;      ///< 1/s
  double out_min = 0.0;
  double out_max = 1.0;
  double bias = 0.0;    ///< feedforward duty, typically vref/vin
  double dt_s = 0.0;
};

/// Default voltage-loop gains for the given power stage. The spectral loop
/// is modeled as a first-order lag with tau = 5/(2*pi*fc); on top of that
/// the LC output filter is lightly damped, so the proportional gain is
/// capped such that the loop magnitude stays below 1/2.5 at the resonance
/// peak (a pure PI cannot add phase there). The integrator zero sits well
/// below the resonance. Crossover ends up at min(fc/20, resonance-limited).
PiParams design_pi(double fc_hz, const PlantParams& plant, double vref_v);

/// Discrete PI with output clamping and integrator anti-windup. The output
/// doubles as the converter duty reference and the DC shift of the spectral
/// window.
class PiController {
 public:
  explicit PiController(const PiParams& params);

  double step(double vref_v, double vmeas_v);

  /// Seed the integrator so the first output equals steady_duty; avoids a
  /// startup transient when the plant begins at its operating point.
  void preload(double steady_duty);

  double integrator() const { return integ_; }
  const PiParams& params() const { return params_; }

 private:
  PiParams params_;
  double integ_ = 0.0;
};

}  // namespace specmpc
