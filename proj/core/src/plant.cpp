#include "specmpc/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace specmpc {

void PlantParams::validate() const {
  if (!(vin_v > 0.0) || !(inductance_h > 0.0) || !(capacitance_f > 0.0) ||
      !(dt_s > 0.0)) {
    throw std::invalid_argument(
        "PlantParams: vin, L, C and dt must be positive");
  }
  if (series_resistance_ohm < 0.0) {
    throw std::invalid_argument("PlantParams: series resistance must be >= 0");
  }
  if (load.kind == LoadModel::Kind::resistance && !(load.value > 0.0)) {
    throw std::invalid_argument("PlantParams: load resistance must be positive");
  }
}

BuckDiscretization::BuckDiscretization(const PlantParams& params)
    : params_(params) {
  params_.validate();
  const double l = params_.inductance_h;
  const double c = params_.capacitance_f;
  const double rl = params_.series_resistance_ohm;

  // x = [iL, vC]:
  //   L diL/dt = u*Vin - rl*iL - vC
  //   C dvC/dt = iL - i_load,   i_load = vC/R or constant sink
  a_ = {-rl / l, -1.0 / l, 1.0 / c, 0.0};
  if (params_.load.kind == LoadModel::Kind::resistance) {
    a_[3] = -1.0 / (params_.load.value * c);
  }
  phi_dt_ = phi(params_.dt_s);

  for (int u = 0; u <= 1; ++u) {
    // solve A*x = -b for the held-switch fixed point
    const double b0 = u * params_.vin_v / l;
    const double b1 = params_.load.kind == LoadModel::Kind::current_sink
                          ? -params_.load.value / c
                          : 0.0;
    const double det = a_[0] * a_[3] - a_[1] * a_[2];
    eq_[u].inductor_a = (-b0 * a_[3] + b1 * a_[1]) / det;
    eq_[u].capacitor_v = (-a_[0] * b1 + a_[2] * b0) / det;
  }
}

// expm(A*tau) for 2x2 A via the scalar decomposition A = mu*I + (A - mu*I):
// the deviatoric part squares to disc*I, so the exponential collapses to
// c(tau)*I + s(tau)*(A - mu*I) with {cosh,cos} / {sinh,sin} pairs picked by
// the sign of disc.
BuckDiscretization::Mat2 BuckDiscretization::phi(double tau_s) const {
  const double mu = 0.5 * (a_[0] + a_[3]);
  const double det = a_[0] * a_[3] - a_[1] * a_[2];
  const double disc = mu * mu - det;

  double c, s;  // scalar cosh/cos and sinh/sin over omega
  const double scale = std::abs(mu * mu) + std::abs(det);
  if (std::abs(disc) <= 1e-14 * scale) {
    c = 1.0;
    s = tau_s;
  } else if (disc > 0.0) {
    const double omega = std::sqrt(disc);
    c = std::cosh(omega * tau_s);
    s = std::sinh(omega * tau_s) / omega;
  } else {
    const double omega = std::sqrt(-disc);
    const double x = omega * tau_s;
    c = std::cos(x);
    s = x < 1e-8 ? tau_s : std::sin(x) / omega;
  }
  const double e = std::exp(mu * tau_s);
  return {e * (c + s * (a_[0] - mu)), e * s * a_[1], e * s * a_[2],
          e * (c + s * (a_[3] - mu))};
}

PlantState BuckDiscretization::step(const PlantState& x,
                                    int switch_state) const {
  const PlantState& eq = eq_[switch_state];
  const double di = x.inductor_a - eq.inductor_a;
  const double dv = x.capacitor_v - eq.capacitor_v;
  return {eq.inductor_a + phi_dt_[0] * di + phi_dt_[1] * dv,
          eq.capacitor_v + phi_dt_[2] * di + phi_dt_[3] * dv};
}

PlantState BuckDiscretization::advance(const PlantState& x, int switch_state,
                                       double tau_s) const {
  if (tau_s <= 0.0) return x;
  const Mat2 m = phi(tau_s);
  const PlantState& eq = eq_[switch_state];
  const double di = x.inductor_a - eq.inductor_a;
  const double dv = x.capacitor_v - eq.capacitor_v;
  return {eq.inductor_a + m[0] * di + m[1] * dv,
          eq.capacitor_v + m[2] * di + m[3] * dv};
}

PlantState BuckDiscretization::equilibrium(int switch_state) const {
  return eq_[switch_state];
}

PlantState plant_step(const PlantState& x, int switch_state,
                      const BuckDiscretization& disc) {
  return disc.step(x, switch_state);
}

}  // namespace specmpc
