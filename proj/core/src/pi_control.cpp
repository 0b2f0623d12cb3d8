#include "specmpc/pi_control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace specmpc {

PiParams design_pi(double fc_hz, const PlantParams& plant, double vref_v) {
  const double l = plant.inductance_h;
  const double c = plant.capacitance_f;
  const double w0 = 1.0 / std::sqrt(l * c);

  double inv_q = plant.series_resistance_ohm * std::sqrt(c / l);
  if (plant.load.kind == LoadModel::Kind::resistance) {
    inv_q += std::sqrt(l / c) / plant.load.value;
  }
  const double q = 1.0 / std::max(inv_q, 1e-4);

  const double kp_lag = 0.97 / plant.vin_v;  // lag-model design, fc/20 crossover
  const double kp_res = 0.4 / (plant.vin_v * std::max(q, 1.0));
  const double kp = std::min(kp_lag, kp_res);
  const double wz =
      std::min(w0 / 4.0, 2.0 * std::numbers::pi * fc_hz / 80.0);

  PiParams out;
  out.kp = kp;
  out.ki = kp * wz;
  out.bias = vref_v / plant.vin_v;
  out.dt_s = 1.0 / fc_hz;
  return out;
}

PiController::PiController(const PiParams& params) : params_(params) {
  if (!(params_.dt_s > 0.0)) {
    throw std::invalid_argument("PiController: dt must be positive");
  }
  if (!(params_.out_max > params_.out_min)) {
    throw std::invalid_argument("PiController: empty output range");
  }
}

double PiController::step(double vref_v, double vmeas_v) {
  const double err = vref_v - vmeas_v;
  const double unsat = params_.bias + params_.kp * err + integ_;
  const double out = std::clamp(unsat, params_.out_min, params_.out_max);

  // integrate unless pushing further into the active limit
  const bool windup = (unsat > params_.out_max && err > 0.0) ||
                      (unsat < params_.out_min && err < 0.0);
  if (!windup) {
    integ_ += params_.ki * params_.dt_s * err;
    integ_ = std::clamp(integ_, params_.out_min - params_.bias,
                        params_.out_max - params_.bias);
  }
  return out;
}

void PiController::preload(double steady_duty) {
  integ_ = std::clamp(steady_duty - params_.bias,
                      params_.out_min - params_.bias,
                      params_.out_max - params_.bias);
}

}  // namespace specmpc
