#pragma once

#include <array>

namespace specmpc {

/// Output-side load: an ohmic resistance or an ideal bidirectional current
/// sink (how lab loads step between setpoints).
struct LoadModel {
  enum class Kind { resistance, current_sink };
  Kind kind = Kind::resistance;
  double value = 1.0;  ///< ohm or ampere depending on kind
};

struct PlantParams {
  double vin_v = 48.0;
  double inductance_h = 42e-6;
  double capacitance_f = 5e-3;
  double series_resistance_ohm = 0.0;  ///< lumped DCR + switch resistance
  LoadModel load;
  double dt_s = 2.5e-6;  ///< one control period, 1/fc

  void validate() const;
};

struct PlantState {
  double inductor_a = 0.0;
  double capacitor_v = 0.0;
};

/// Exact discretization of the synchronous buck half-bridge: between control
/// edges the circuit is linear time-invariant, so one period is
///   x(t+tau) = x_eq(u) + expm(A*tau) * (x(t) - x_eq(u))
/// with the 2x2 matrix exponential in closed form (the switches themselves
/// are ideal and change state instantaneously at step boundaries).
class BuckDiscretization {
 public:
  explicit BuckDiscretization(const PlantParams& params);

  /// Advance one full control period dt with the switch held at 0 or 1.
  PlantState step(const PlantState& x, int switch_state) const;

  /// Advance an arbitrary interval; used by the PWM baseline whose edges
  /// fall between grid samples.
  PlantState advance(const PlantState& x, int switch_state, double tau_s) const;

  /// Fixed point of the held-switch dynamics.
  PlantState equilibrium(int switch_state) const;

  const PlantParams& params() const { return params_; }

 private:
  using Mat2 = std::array<double, 4>;  // row major

  Mat2 phi(double tau_s) const;

  PlantParams params_;
  Mat2 a_;            // continuous-time system matrix
  Mat2 phi_dt_;       // expm(A*dt)
  PlantState eq_[2];  // per switch position
};

/// Single-period convenience wrapper over BuckDiscretization::step.
PlantState plant_step(const PlantState& x, int switch_state,
                      const BuckDiscretization& disc);

}  // namespace specmpc
