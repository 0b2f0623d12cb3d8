#include "specmpc/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "specmpc/analysis.hpp"
#include "specmpc/pi_control.hpp"

namespace specmpc {

namespace {

ReferenceSpectrum build_reference(const Scenario& sc) {
  const int half = sc.controller.window_samples / 2;
  if (sc.reference.kind == ReferenceSettings::Kind::zero) {
    return ReferenceSpectrum::zero(half);
  }
  if (!sc.reference.level.has_value()) {
    throw std::logic_error(
        "build_reference: auto level not resolved before the run");
  }
  return ReferenceSpectrum::flat(half,
                                 sc.controller.fc_hz /
                                     sc.controller.window_samples,
                                 sc.reference.f_start_hz, *sc.reference.level);
}

double steady_load_current(const PlantParams& plant, double vref_v) {
  return plant.load.kind == LoadModel::Kind::current_sink
             ? plant.load.value
             : vref_v / plant.load.value;
}

PiController make_pi(const Scenario& sc) {
  PiParams params =
      design_pi(sc.controller.fc_hz, sc.plant, sc.output_control.vref_v);
  if (sc.output_control.kp.has_value()) params.kp = *sc.output_control.kp;
  if (sc.output_control.ki.has_value()) params.ki = *sc.output_control.ki;
  return PiController(params);
}

/// Linear motion of one gap band toward a target center.
struct GapMover {
  bool active = false;
  int gap_index = 0;
  double target_hz = 0.0;
  double rate_hz_per_s = 0.0;
  double start_hz = 0.0;
  double t_start_s = 0.0;

  double commanded(double t_s) const {
    if (rate_hz_per_s <= 0.0) return target_hz;
    const double span = rate_hz_per_s * (t_s - t_start_s);
    if (target_hz >= start_hz) return std::min(start_hz + span, target_hz);
    return std::max(start_hz - span, target_hz);
  }
};

}  // namespace

RunArtifacts run_scenario(const Scenario& scenario,
                          std::optional<std::uint64_t> seed_override) {
  Scenario sc = scenario;
  if (seed_override.has_value()) sc.seed = *seed_override;
  resolve_auto_reference(sc);
  {
    auto errs = validate_scenario(sc);
    if (!errs.empty()) {
      std::string msg = "run_scenario: invalid scenario \"" + sc.name + "\"";
      for (const auto& e : errs) msg += "\n  " + e;
      throw std::invalid_argument(msg);
    }
  }

  const EngineConfig engine = sc.engine_config();
  const double dt = 1.0 / sc.controller.fc_hz;
  sc.plant.dt_s = dt;

  FilterSpec live_filter = sc.filter;
  FilterWeights weights =
      compile(live_filter, engine.window_samples, engine.control_hz);
  if (!sc.controller.dc_weight.has_value()) {
    // auto: continue the filter's low-frequency weighting into bin 0
    sc.controller.dc_weight = weights.at_bin(1);
  }
  Controller controller(engine, std::move(weights), build_reference(sc),
                        sc.cost_weights(),
                        HorizonConfig{sc.controller.horizon_steps});

  PlantParams plant_params = sc.plant;
  auto disc = std::make_unique<BuckDiscretization>(plant_params);

  const double vref = sc.output_control.vref_v;
  const double i0 = steady_load_current(plant_params, vref);
  const double duty0 =
      (vref + plant_params.series_resistance_ohm * i0) / plant_params.vin_v;
  PlantState x{i0, vref};

  PiController pi = make_pi(sc);
  pi.preload(duty0);

  const auto steps = static_cast<std::int64_t>(
      std::llround(sc.duration_s * sc.controller.fc_hz));

  RunArtifacts out;
  out.scenario = sc;
  out.reference_level = sc.reference.kind == ReferenceSettings::Kind::flat
                            ? sc.reference.level.value_or(0.0)
                            : 0.0;
  out.switch_trace.reserve(static_cast<std::size_t>(steps));
  out.vc_trace.reserve(static_cast<std::size_t>(steps));
  out.il_trace.reserve(static_cast<std::size_t>(steps));
  out.duty_trace.reserve(static_cast<std::size_t>(steps));

  // time-averaged |F_n|^2 per bin, for reference calibration and diagnostics
  std::vector<double> mag_acc(
      static_cast<std::size_t>(engine.stored_bins()), 0.0);
  std::int64_t mag_samples = 0;
  const std::int64_t mag_every = std::max(1, engine.window_samples / 4);

  GapMover mover;
  double compiled_center = 0.0;
  const double recompile_quantum = engine.bin_hz();

  std::size_t next_event = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;

    while (next_event < sc.events.size() &&
           sc.events[next_event].t_s <= t + dt / 2.0) {
      const Event& e = sc.events[next_event++];
      switch (e.kind) {
        case Event::Kind::load_step:
          plant_params.load = e.load;
          disc = std::make_unique<BuckDiscretization>(plant_params);
          break;
        case Event::Kind::gap_move: {
          mover.active = true;
          mover.gap_index = e.gap_index;
          mover.target_hz = e.gap_target_hz;
          mover.rate_hz_per_s = e.gap_rate_hz_per_s;
          mover.start_hz =
              live_filter.gaps[static_cast<std::size_t>(e.gap_index)]
                  .f_center_hz;
          mover.t_start_s = t;
          compiled_center = mover.start_hz;
          out.gap_center_trace.emplace_back(t, mover.start_hz);
          break;
        }
        case Event::Kind::weight_change: {
          CostWeights cw = controller.cost_weights();
          if (e.lambda1.has_value()) cw.lambda1 = *e.lambda1;
          if (e.lambda2.has_value()) cw.lambda2 = *e.lambda2;
          controller.set_cost_weights(cw);
          break;
        }
        case Event::Kind::kmax_change: {
          CostWeights cw = controller.cost_weights();
          cw.k_max = e.k_max;
          controller.set_cost_weights(cw);
          break;
        }
      }
    }

    if (mover.active) {
      const double pos = mover.commanded(t);
      if (std::abs(pos - compiled_center) >= recompile_quantum ||
          pos == mover.target_hz) {
        live_filter = move_gap(live_filter, mover.gap_index, pos,
                               engine.control_hz);
        controller.set_filter(
            compile(live_filter, engine.window_samples, engine.control_hz));
        compiled_center = pos;
        out.gap_center_trace.emplace_back(t, pos);
        if (pos == mover.target_hz) mover.active = false;
      }
    }

    const double vmeas = x.capacitor_v;
    const double duty = pi.step(vref, vmeas);
    const int bit = controller.step(duty);

    out.switch_trace.push_back(static_cast<std::int8_t>(bit));
    out.vc_trace.push_back(x.capacitor_v);
    out.il_trace.push_back(x.inductor_a);
    out.duty_trace.push_back(duty);

    x = disc->step(x, bit);

    if (k >= engine.window_samples && (k % mag_every) == 0) {
      const auto& bins = controller.state().spectrum.bins;
      for (std::size_t n = 1; n < bins.size(); ++n) {
        mag_acc[n] += std::norm(bins[n]);
      }
      ++mag_samples;
    }
  }

  if (mag_samples > 0) {
    out.mean_bin_mag_sq.resize(mag_acc.size(), 0.0);
    for (std::size_t n = 0; n < mag_acc.size(); ++n) {
      out.mean_bin_mag_sq[n] = mag_acc[n] / static_cast<double>(mag_samples);
    }
  }
  out.resync_count = controller.resync_count();

  if (sc.pwm.enabled && steps > 0) {
    const double discard = sc.analysis.steady_state_fraction;
    const auto skip = static_cast<std::size_t>(
        static_cast<double>(out.duty_trace.size()) * discard);
    double duty_acc = 0.0;
    for (std::size_t i = skip; i < out.duty_trace.size(); ++i) {
      duty_acc += out.duty_trace[i];
    }
    out.pwm_duty = duty_acc / static_cast<double>(out.duty_trace.size() - skip);
    out.pwm_freq_hz = sc.pwm.f_pwm_hz.value_or(
        avg_switching_frequency(out.switch_trace, sc.duration_s));
    if (out.pwm_freq_hz > 0.0) {
      PwmParams pwm_params;
      pwm_params.duty = out.pwm_duty;
      pwm_params.f_pwm_hz = out.pwm_freq_hz;
      pwm_params.duration_s = sc.duration_s;
      pwm_params.oversample = sc.pwm.oversample;
      pwm_params.control_hz = sc.controller.fc_hz;
      BuckDiscretization pwm_disc(sc.plant);
      out.pwm = pwm_baseline(pwm_params, pwm_disc,
                             PlantState{steady_load_current(sc.plant, vref),
                                        vref});
    }
  }

  return out;
}

void resolve_auto_reference(Scenario& scenario) {
  if (scenario.reference.kind != ReferenceSettings::Kind::flat ||
      scenario.reference.level.has_value()) {
    return;
  }
  Scenario cal = scenario;
  cal.reference.kind = ReferenceSettings::Kind::zero;
  cal.pwm.enabled = false;
  cal.events.clear();
  cal.analysis.spectrogram.enabled = false;
  // a few windows of unshaped operation are enough to set the scale
  const double min_span =
      8.0 * scenario.controller.window_samples / scenario.controller.fc_hz;
  cal.duration_s = std::min(scenario.duration_s, std::max(0.05, min_span));
  cal.name += "_reference_calibration";

  RunArtifacts art = run_scenario(cal);
  if (art.mean_bin_mag_sq.empty()) {
    throw std::runtime_error(
        "resolve_auto_reference: calibration run too short for window " +
        std::to_string(scenario.controller.window_samples));
  }
  const double bin_hz =
      scenario.controller.fc_hz / scenario.controller.window_samples;
  double acc = 0.0;
  std::int64_t count = 0;
  for (std::size_t n = 1; n < art.mean_bin_mag_sq.size(); ++n) {
    if (static_cast<double>(n) * bin_hz >= scenario.reference.f_start_hz) {
      acc += art.mean_bin_mag_sq[n];
      ++count;
    }
  }
  if (count == 0) {
    throw std::runtime_error(
        "resolve_auto_reference: no bins at or above f_start_hz");
  }
  const double level = std::sqrt(acc / static_cast<double>(count));
  scenario.reference.level = level;
  std::cerr << "specmpc: calibrated flat reference level for \""
            << scenario.name << "\": " << level << "\n";
}

std::optional<SweepParameter> sweep_parameter_from_name(
    const std::string& name) {
  if (name == "lambda2") return SweepParameter::lambda2;
  if (name == "M" || name == "horizon") return SweepParameter::horizon;
  if (name == "k_max" || name == "K_max") return SweepParameter::k_max;
  return std::nullopt;
}

std::vector<SweepPoint> make_sweep(const Scenario& base, SweepParameter param,
                                   const std::vector<std::string>& values) {
  std::vector<SweepPoint> points;
  for (const auto& v : values) {
    SweepPoint pt;
    pt.scenario = base;
    switch (param) {
      case SweepParameter::lambda2: {
        pt.scenario.controller.lambda2 = std::stod(v);
        pt.label = "lambda2=" + v;
        break;
      }
      case SweepParameter::horizon: {
        pt.scenario.controller.horizon_steps = std::stoi(v);
        pt.label = "M=" + v;
        break;
      }
      case SweepParameter::k_max: {
        if (v == "inf") {
          pt.scenario.controller.k_max = std::nullopt;
        } else {
          pt.scenario.controller.k_max = std::stoi(v);
        }
        pt.label = "k_max=" + v;
        break;
      }
    }
    pt.scenario.name = base.name + "_" + pt.label;
    points.push_back(std::move(pt));
  }
  return points;
}

std::vector<SweepResult> run_sweep(const std::vector<SweepPoint>& points,
                                   int threads,
                                   std::optional<std::uint64_t> seed_override) {
  std::vector<SweepResult> results(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    results[i].label = points[i].label;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  const int workers = std::max(
      1, std::min<int>(threads, static_cast<int>(points.size())));

  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size() || failed.load()) return;
      try {
        results[i].artifacts = run_scenario(points[i].scenario, seed_override);
      } catch (const std::exception& e) {
        results[i].error = e.what();
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  return results;
}

}  // namespace specmpc
