#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "specmpc/analysis.hpp"
#include "specmpc/controller.hpp"
#include "specmpc/plant.hpp"
#include "specmpc/spectral_filter.hpp"

namespace specmpc {

struct ControllerSettings {
  double fc_hz = 400e3;
  int window_samples = 2048;
  int resync_interval = 65536;
  int horizon_steps = 1;
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  NormOrder norm = NormOrder::inf;
  std::optional<std::int32_t> k_max;  ///< nullopt = unlimited
  /// weight of the DC bin in the spectral cost; nullopt = adopt the
  /// compiled filter's bin-1 weight ("auto")
  std::optional<double> dc_weight;
};

struct OutputControlSettings {
  double vref_v = 12.0;
  std::optional<double> kp;  ///< nullopt = designed default
  std::optional<double> ki;
};

struct ReferenceSettings {
  enum class Kind { zero, flat };
  Kind kind = Kind::zero;
  double f_start_hz = 0.0;
  std::optional<double> level;  ///< nullopt = calibrate from an unshaped run
};

struct PwmBaselineSettings {
  bool enabled = false;
  std::optional<double> f_pwm_hz;  ///< nullopt = match measured switching rate
  int oversample = 16;
};

struct SpectrogramSettings {
  bool enabled = false;
  int window_length = 8192;
  int hop = 4096;
};

struct GapMetricSettings {
  int gap_index = 0;
  double flank_width_hz = 2000.0;
  double guard_hz = 0.0;  ///< spacing between gap edge and flank start
};

struct AnalysisSettings {
  int segment_length = 0;  ///< 0 = window_samples
  double overlap = 0.5;
  SpectralWindow window = SpectralWindow::hann;
  double steady_state_fraction = 0.2;  ///< discarded before statistics
  int sfdr_neighborhood = 3;
  std::optional<std::pair<double, double>> distortion_band_hz;
  std::optional<GapMetricSettings> gap_metric;
  SpectrogramSettings spectrogram;
};

struct Event {
  enum class Kind { load_step, gap_move, weight_change, kmax_change };
  double t_s = 0.0;
  Kind kind = Kind::load_step;

  LoadModel load;                        // load_step
  int gap_index = 0;                     // gap_move
  double gap_target_hz = 0.0;            // gap_move
  double gap_rate_hz_per_s = 0.0;        // gap_move, 0 = jump
  std::optional<double> lambda1;         // weight_change
  std::optional<double> lambda2;         // weight_change
  std::optional<std::int32_t> k_max;     // kmax_change (nullopt = unlimited)
};

/// Everything one closed-loop run needs, mirroring the JSON scenario file.
struct Scenario {
  int schema_version = 1;
  std::string name;
  std::string description;
  double duration_s = 0.0;
  std::uint64_t seed = 1;
  ControllerSettings controller;
  PlantParams plant;  ///< dt_s is derived from fc at run time
  OutputControlSettings output_control;
  FilterSpec filter;
  ReferenceSettings reference;
  PwmBaselineSettings pwm;
  std::vector<Event> events;
  AnalysisSettings analysis;

  EngineConfig engine_config() const {
    return EngineConfig{controller.window_samples, controller.fc_hz,
                        controller.resync_interval};
  }
  CostWeights cost_weights() const {
    return CostWeights{controller.lambda1, controller.lambda2, controller.norm,
                       controller.k_max, controller.dc_weight.value_or(0.0)};
  }
};

/// Semantic checks beyond structural parsing; returns one message per
/// violation with a dotted path into the configuration.
std::vector<std::string> validate_scenario(const Scenario& scenario);

struct ScenarioParseResult {
  Scenario scenario;
  std::vector<std::string> diagnostics;  ///< missing/ill-typed fields
};

/// Parses JSON text; structural problems are collected, not thrown, so a
/// validate command can list everything at once. Syntactically broken JSON
/// throws std::runtime_error with a line/column position.
ScenarioParseResult parse_scenario(const std::string& json_text);

ScenarioParseResult load_scenario_file(const std::string& path);

/// Canonical serialization (used for the copy stored with run artifacts).
std::string scenario_to_json(const Scenario& scenario);

const char* norm_name(NormOrder p);
std::optional<NormOrder> norm_from_name(const std::string& name);

}  // namespace specmpc
