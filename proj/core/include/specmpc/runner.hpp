#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specmpc/pwm.hpp"
#include "specmpc/scenario.hpp"

namespace specmpc {

/// Raw closed-loop traces of one run, all sampled at the control rate.
struct RunArtifacts {
  Scenario scenario;  ///< resolved copy (auto values substituted)
  std::vector<std::int8_t> switch_trace;
  std::vector<double> vc_trace;
  std::vector<double> il_trace;
  std::vector<double> duty_trace;
  /// (t, commanded gap center) whenever a gap is in motion
  std::vector<std::pair<double, double>> gap_center_trace;
  std::optional<PwmRun> pwm;
  double pwm_duty = 0.0;
  double pwm_freq_hz = 0.0;
  double reference_level = 0.0;  ///< resolved flat-reference level, 0 if none
  /// time-mean of |F_n|^2 per stored bin, sampled every N/4 steps once the
  /// window has filled; empty when the run is shorter than one window
  std::vector<double> mean_bin_mag_sq;
  std::uint64_t resync_count = 0;

  double dt_s() const { return 1.0 / scenario.controller.fc_hz; }
  double duration_s() const {
    return static_cast<double>(switch_trace.size()) * dt_s();
  }
};

/// Executes the full measure -> PI -> spectral step -> plant loop, applies
/// timeline events, and (when enabled) runs the matched PWM baseline
/// afterwards. Deterministic for a given scenario and seed.
RunArtifacts run_scenario(const Scenario& scenario,
                          std::optional<std::uint64_t> seed_override = {});

/// Resolves an auto flat-reference level in place by measuring the mean
/// per-bin window magnitude of a short unshaped (zero-reference) run; the
/// level is chosen so the total target power matches it. Logged to stderr.
void resolve_auto_reference(Scenario& scenario);

struct SweepPoint {
  std::string label;
  Scenario scenario;
};

enum class SweepParameter { lambda2, horizon, k_max };

std::optional<SweepParameter> sweep_parameter_from_name(
    const std::string& name);

/// Builds the per-point scenarios for a sweep; labels carry the value.
std::vector<SweepPoint> make_sweep(const Scenario& base, SweepParameter param,
                                   const std::vector<std::string>& values);

/// Runs points on up to `threads` workers. Points are independent; results
/// arrive in point order regardless of scheduling. A failed point carries
/// its error message instead of artifacts.
struct SweepResult {
  std::string label;
  std::optional<RunArtifacts> artifacts;
  std::string error;
};
std::vector<SweepResult> run_sweep(const std::vector<SweepPoint>& points,
                                   int threads,
                                   std::optional<std::uint64_t> seed_override);

}  // namespace specmpc
