#include "specmpc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace specmpc {

namespace {

std::vector<double> steady_doubles(std::span<const std::int8_t> bits,
                                   double discard_fraction) {
  const auto skip = static_cast<std::size_t>(
      static_cast<double>(bits.size()) * discard_fraction);
  std::vector<double> out;
  out.reserve(bits.size() - skip);
  for (std::size_t i = skip; i < bits.size(); ++i) {
    out.push_back(static_cast<double>(bits[i]));
  }
  return out;
}

double steady_mean(std::span<const double> v, double discard_fraction) {
  const auto skip = static_cast<std::size_t>(
      static_cast<double>(v.size()) * discard_fraction);
  if (skip >= v.size()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = skip; i < v.size(); ++i) acc += v[i];
  return acc / static_cast<double>(v.size() - skip);
}

int effective_segment(const Scenario& sc) {
  return sc.analysis.segment_length > 0 ? sc.analysis.segment_length
                                        : sc.controller.window_samples;
}

}  // namespace

std::string fnv1a_hex(std::span<const std::int8_t> data) {
  std::uint64_t h = 1469598103934665603ull;
  for (std::int8_t b : data) {
    h ^= static_cast<std::uint8_t>(b);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

int longest_identical_run(std::span<const std::int8_t> trace) {
  int best = 0, run = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0 && trace[i] == trace[i - 1]) {
      ++run;
    } else {
      run = 1;
    }
    best = std::max(best, run);
  }
  return best;
}

PowerSpectrum switch_spectrum(const RunArtifacts& artifacts) {
  const auto& sc = artifacts.scenario;
  const auto trace = steady_doubles(artifacts.switch_trace,
                                    sc.analysis.steady_state_fraction);
  return welch_spectrum(trace, sc.controller.fc_hz, effective_segment(sc),
                        sc.analysis.overlap, sc.analysis.window);
}

PowerSpectrum pwm_spectrum(const RunArtifacts& artifacts) {
  if (!artifacts.pwm.has_value()) {
    throw std::logic_error("pwm_spectrum: run has no PWM baseline");
  }
  const auto& sc = artifacts.scenario;
  const auto trace = steady_doubles(artifacts.pwm->switch_trace,
                                    sc.analysis.steady_state_fraction);
  return welch_spectrum(trace, artifacts.pwm->sample_hz,
                        effective_segment(sc) * sc.pwm.oversample,
                        sc.analysis.overlap, sc.analysis.window);
}

RunMetrics compute_metrics(const RunArtifacts& artifacts) {
  const auto& sc = artifacts.scenario;
  const double discard = sc.analysis.steady_state_fraction;
  RunMetrics m;
  m.duration_s = artifacts.duration_s();
  m.reference_level = artifacts.reference_level;
  m.resync_count = artifacts.resync_count;
  m.switch_trace_fnv1a = fnv1a_hex(artifacts.switch_trace);
  if (artifacts.switch_trace.empty()) return m;

  m.rising_edges = rising_edge_count(artifacts.switch_trace);
  m.avg_switching_hz =
      avg_switching_frequency(artifacts.switch_trace, m.duration_s);
  m.max_hold_run = longest_identical_run(artifacts.switch_trace);
  m.mean_vc_v = steady_mean(artifacts.vc_trace, discard);
  m.ripple_variance_v2 = trace_variance(artifacts.vc_trace, discard);
  m.ripple_p2p_v = trace_peak_to_peak(artifacts.vc_trace, discard);
  m.steady_mean_duty = steady_mean(artifacts.duty_trace, discard);

  const int segment = effective_segment(sc);
  if (static_cast<int>(artifacts.switch_trace.size() *
                       (1.0 - discard)) >= segment) {
    const PowerSpectrum spec = switch_spectrum(artifacts);
    try {
      m.sfdr_db = sfdr(spec, sc.analysis.sfdr_neighborhood);
    } catch (const std::exception&) {
      // featureless spectrum; leave unset
    }
    m.spectral_peak_db = peak_power_db(spec);
    m.dc_sfdr_db = -*m.spectral_peak_db;
    if (sc.analysis.distortion_band_hz.has_value()) {
      m.distortion_power = distortion_power(spec, *sc.analysis.distortion_band_hz);
    }
    if (sc.analysis.gap_metric.has_value() && !sc.filter.gaps.empty()) {
      const auto& gm = *sc.analysis.gap_metric;
      const auto& gap =
          sc.filter.gaps[static_cast<std::size_t>(gm.gap_index)];
      const double lo = gap.f_center_hz - gap.width_hz / 2.0;
      const double hi = gap.f_center_hz + gap.width_hz / 2.0;
      const std::pair<double, double> flanks[2] = {
          {lo - gm.guard_hz - gm.flank_width_hz, lo - gm.guard_hz},
          {hi + gm.guard_hz, hi + gm.guard_hz + gm.flank_width_hz}};
      m.gap_depth_db = gap_depth(spec, {lo, hi}, flanks);
    }
  }

  if (artifacts.pwm.has_value() && !artifacts.pwm->switch_trace.empty()) {
    const PowerSpectrum spec = pwm_spectrum(artifacts);
    try {
      m.pwm_sfdr_db = sfdr(spec, sc.analysis.sfdr_neighborhood);
    } catch (const std::exception&) {
    }
    m.pwm_fundamental_db = peak_power_db(spec);
    m.pwm_dc_sfdr_db = -*m.pwm_fundamental_db;
    m.pwm_avg_switching_hz = avg_switching_frequency(
        artifacts.pwm->switch_trace,
        static_cast<double>(artifacts.pwm->switch_trace.size()) /
            artifacts.pwm->sample_hz);
    m.pwm_ripple_variance_v2 = trace_variance(artifacts.pwm->vc_trace, discard);
    m.pwm_ripple_p2p_v = trace_peak_to_peak(artifacts.pwm->vc_trace, discard);
    m.pwm_mean_vc_v = steady_mean(artifacts.pwm->vc_trace, discard);
  }
  return m;
}

std::string metrics_to_json(const RunMetrics& m, const Scenario& sc) {
  nlohmann::ordered_json j;
  j["scenario"] = sc.name;
  j["seed"] = sc.seed;
  j["duration_s"] = m.duration_s;
  j["config"] = {{"fc_hz", sc.controller.fc_hz},
                 {"window_samples", sc.controller.window_samples},
                 {"horizon_steps", sc.controller.horizon_steps},
                 {"lambda1", sc.controller.lambda1},
                 {"lambda2", sc.controller.lambda2},
                 {"norm", norm_name(sc.controller.norm)}};
  if (sc.controller.k_max.has_value()) {
    j["config"]["k_max"] = *sc.controller.k_max;
  } else {
    j["config"]["k_max"] = "inf";
  }
  j["mean_vc_v"] = m.mean_vc_v;
  j["avg_switching_hz"] = m.avg_switching_hz;
  j["rising_edges"] = m.rising_edges;
  j["max_hold_run"] = m.max_hold_run;
  j["ripple_variance_v2"] = m.ripple_variance_v2;
  j["ripple_p2p_v"] = m.ripple_p2p_v;
  j["steady_mean_duty"] = m.steady_mean_duty;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v.has_value()) j[key] = *v;
  };
  put("sfdr_db", m.sfdr_db);
  put("dc_sfdr_db", m.dc_sfdr_db);
  put("spectral_peak_db", m.spectral_peak_db);
  put("distortion_power", m.distortion_power);
  put("gap_depth_db", m.gap_depth_db);
  put("pwm_sfdr_db", m.pwm_sfdr_db);
  put("pwm_dc_sfdr_db", m.pwm_dc_sfdr_db);
  put("pwm_fundamental_db", m.pwm_fundamental_db);
  put("pwm_avg_switching_hz", m.pwm_avg_switching_hz);
  put("pwm_ripple_variance_v2", m.pwm_ripple_variance_v2);
  put("pwm_ripple_p2p_v", m.pwm_ripple_p2p_v);
  put("pwm_mean_vc_v", m.pwm_mean_vc_v);
  if (m.reference_level > 0.0) j["reference_level"] = m.reference_level;
  j["resync_count"] = m.resync_count;
  j["switch_trace_fnv1a"] = m.switch_trace_fnv1a;
  return j.dump(2) + "\n";
}

}  // namespace specmpc
