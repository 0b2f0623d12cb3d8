#pragma once

#include <optional>
#include <string>

#include "specmpc/analysis.hpp"
#include "specmpc/runner.hpp"

namespace specmpc {

/// Headline numbers of one run. Spectral quantities come from the switch
/// trace (the quantity the controller shapes); ripple and regulation from
/// the output voltage.
struct RunMetrics {
  double duration_s = 0.0;
  double mean_vc_v = 0.0;
  double avg_switching_hz = 0.0;
  std::int64_t rising_edges = 0;
  int max_hold_run = 0;  ///< longest run of identical consecutive outputs
  double ripple_variance_v2 = 0.0;
  double ripple_p2p_v = 0.0;
  double steady_mean_duty = 0.0;
  std::optional<double> sfdr_db;          ///< largest vs second-largest peak
  std::optional<double> dc_sfdr_db;       ///< DC power vs largest spur
  std::optional<double> spectral_peak_db;
  std::optional<double> distortion_power;
  std::optional<double> gap_depth_db;
  std::optional<double> pwm_sfdr_db;
  std::optional<double> pwm_dc_sfdr_db;
  std::optional<double> pwm_fundamental_db;
  std::optional<double> pwm_avg_switching_hz;
  std::optional<double> pwm_ripple_variance_v2;
  std::optional<double> pwm_ripple_p2p_v;
  std::optional<double> pwm_mean_vc_v;
  double reference_level = 0.0;
  std::uint64_t resync_count = 0;
  std::string switch_trace_fnv1a;  ///< hex hash, determinism checks
};

/// Welch spectrum of the steady-state part of the switch trace, with the
/// scenario's analysis settings.
PowerSpectrum switch_spectrum(const RunArtifacts& artifacts);

/// Same for the PWM baseline trace (oversampled rate, segment scaled by the
/// oversample factor so the bin width matches the spectral run).
PowerSpectrum pwm_spectrum(const RunArtifacts& artifacts);

RunMetrics compute_metrics(const RunArtifacts& artifacts);

/// Stable, byte-reproducible JSON rendering.
std::string metrics_to_json(const RunMetrics& metrics,
                            const Scenario& scenario);

std::string fnv1a_hex(std::span<const std::int8_t> data);

int longest_identical_run(std::span<const std::int8_t> trace);

}  // namespace specmpc
