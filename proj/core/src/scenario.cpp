#include "specmpc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace specmpc {

using nlohmann::json;
using nlohmann::ordered_json;

const char* norm_name(NormOrder p) {
  switch (p) {
    case NormOrder::one:
      return "1";
    case NormOrder::two:
      return "2";
    case NormOrder::inf:
      return "inf";
  }
  return "inf";
}

std::optional<NormOrder> norm_from_name(const std::string& name) {
  if (name == "1") return NormOrder::one;
  if (name == "2") return NormOrder::two;
  if (name == "inf") return NormOrder::inf;
  return std::nullopt;
}

namespace {

/// Collects one diagnostic per structural problem while pulling typed
/// values out of the document; absent optional fields keep their defaults.
struct Reader {
  std::vector<std::string>& errs;

  bool has(const json& j, const char* key) const {
    return j.is_object() && j.contains(key);
  }

  template <typename T>
  void require(const json& j, const std::string& path, const char* key,
               T& out) {
    if (!j.is_object() || !j.contains(key)) {
      errs.push_back(path + key + ": missing required key");
      return;
    }
    assign(j.at(key), path + key, out);
  }

  template <typename T>
  void optional_key(const json& j, const std::string& path, const char* key,
                    T& out) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return;
    assign(j.at(key), path + key, out);
  }

  void assign(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) {
      errs.push_back(path + ": expected a number");
      return;
    }
    out = v.get<double>();
  }
  void assign(const json& v, const std::string& path, int& out) {
    if (!v.is_number_integer()) {
      errs.push_back(path + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }
  void assign(const json& v, const std::string& path, std::uint64_t& out) {
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      errs.push_back(path + ": expected an integer");
      return;
    }
    out = v.get<std::uint64_t>();
  }
  void assign(const json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) {
      errs.push_back(path + ": expected a boolean");
      return;
    }
    out = v.get<bool>();
  }
  void assign(const json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) {
      errs.push_back(path + ": expected a string");
      return;
    }
    out = v.get<std::string>();
  }
  void assign(const json& v, const std::string& path,
              std::optional<double>& out) {
    double d = 0.0;
    assign(v, path, d);
    out = d;
  }
};

std::optional<std::int32_t> parse_k_max(const json& v,
                                        const std::string& path,
                                        std::vector<std::string>& errs) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::nullopt;
    errs.push_back(path + R"(: expected an integer or "inf")");
    return std::nullopt;
  }
  if (v.is_number_integer()) return v.get<std::int32_t>();
  errs.push_back(path + R"(: expected an integer or "inf")");
  return std::nullopt;
}

LoadModel parse_load(const json& j, const std::string& path,
                     std::vector<std::string>& errs) {
  LoadModel load;
  Reader r{errs};
  std::string type;
  r.require(j, path, "type", type);
  if (type == "resistance") {
    load.kind = LoadModel::Kind::resistance;
    r.require(j, path, "ohm", load.value);
  } else if (type == "current") {
    load.kind = LoadModel::Kind::current_sink;
    r.require(j, path, "amps", load.value);
  } else if (!type.empty()) {
    errs.push_back(path + R"(type: expected "resistance" or "current")");
  }
  return load;
}

json load_to_json(const LoadModel& load) {
  ordered_json j;
  if (load.kind == LoadModel::Kind::resistance) {
    j["type"] = "resistance";
    j["ohm"] = load.value;
  } else {
    j["type"] = "current";
    j["amps"] = load.value;
  }
  return j;
}

ScenarioParseResult parse_document(const json& doc) {
  ScenarioParseResult result;
  Scenario& s = result.scenario;
  auto& errs = result.diagnostics;
  Reader r{errs};

  if (!doc.is_object()) {
    errs.push_back("scenario: top level must be a JSON object");
    return result;
  }

  r.require(doc, "", "schema_version", s.schema_version);
  r.require(doc, "", "name", s.name);
  r.optional_key(doc, "", "description", s.description);
  r.require(doc, "", "duration_s", s.duration_s);
  r.optional_key(doc, "", "seed", s.seed);

  if (!r.has(doc, "controller")) {
    errs.push_back("controller: missing required key");
  } else {
    const json& c = doc.at("controller");
    const std::string p = "controller.";
    r.require(c, p, "fc_hz", s.controller.fc_hz);
    r.require(c, p, "window_samples", s.controller.window_samples);
    r.optional_key(c, p, "resync_interval", s.controller.resync_interval);
    r.require(c, p, "horizon_steps", s.controller.horizon_steps);
    r.require(c, p, "lambda1", s.controller.lambda1);
    r.require(c, p, "lambda2", s.controller.lambda2);
    std::string norm = "inf";
    r.require(c, p, "norm", norm);
    if (auto n = norm_from_name(norm)) {
      s.controller.norm = *n;
    } else {
      errs.push_back(p + R"(norm: expected "1", "2" or "inf")");
    }
    if (c.contains("k_max")) {
      s.controller.k_max = parse_k_max(c.at("k_max"), p + "k_max", errs);
    }
    if (c.contains("dc_weight") && !c.at("dc_weight").is_null()) {
      const json& dw = c.at("dc_weight");
      if (dw.is_string() && dw.get<std::string>() == "auto") {
        s.controller.dc_weight = std::nullopt;
      } else if (dw.is_number()) {
        s.controller.dc_weight = dw.get<double>();
      } else {
        errs.push_back(p + R"(dc_weight: expected a number or "auto")");
      }
    }
  }

  if (!r.has(doc, "plant")) {
    errs.push_back("plant: missing required key");
  } else {
    const json& pj = doc.at("plant");
    const std::string p = "plant.";
    r.require(pj, p, "vin_v", s.plant.vin_v);
    r.require(pj, p, "inductance_h", s.plant.inductance_h);
    r.require(pj, p, "capacitance_f", s.plant.capacitance_f);
    r.optional_key(pj, p, "series_resistance_ohm",
                   s.plant.series_resistance_ohm);
    if (pj.contains("load")) {
      s.plant.load = parse_load(pj.at("load"), p + "load.", errs);
    } else {
      errs.push_back(p + "load: missing required key");
    }
  }
  s.plant.dt_s = s.controller.fc_hz > 0.0 ? 1.0 / s.controller.fc_hz : 0.0;

  if (r.has(doc, "output_control")) {
    const json& o = doc.at("output_control");
    const std::string p = "output_control.";
    r.require(o, p, "vref_v", s.output_control.vref_v);
    r.optional_key(o, p, "kp", s.output_control.kp);
    r.optional_key(o, p, "ki", s.output_control.ki);
  } else {
    errs.push_back("output_control: missing required key");
  }

  if (!r.has(doc, "filter")) {
    errs.push_back("filter: missing required key");
  } else {
    const json& f = doc.at("filter");
    if (f.contains("segments") && f.at("segments").is_array()) {
      int i = 0;
      for (const auto& sj : f.at("segments")) {
        FilterSegment seg;
        const std::string p =
            "filter.segments[" + std::to_string(i++) + "].";
        r.require(sj, p, "f_start_hz", seg.f_start_hz);
        r.require(sj, p, "f_end_hz", seg.f_end_hz);
        r.require(sj, p, "magnitude", seg.magnitude);
        std::string shape;
        r.require(sj, p, "shape", shape);
        if (shape == "constant") {
          seg.shape = SegmentShape::constant;
        } else if (shape == "linear_in_f") {
          seg.shape = SegmentShape::linear_in_f;
        } else if (shape == "inverse_in_f") {
          seg.shape = SegmentShape::inverse_in_f;
        } else if (!shape.empty()) {
          errs.push_back(p + "shape: unknown shape \"" + shape + "\"");
        }
        s.filter.segments.push_back(seg);
      }
    } else {
      errs.push_back("filter.segments: missing required key");
    }
    if (f.contains("gaps") && f.at("gaps").is_array()) {
      int i = 0;
      for (const auto& gj : f.at("gaps")) {
        GapBand gap;
        const std::string p = "filter.gaps[" + std::to_string(i++) + "].";
        r.require(gj, p, "f_center_hz", gap.f_center_hz);
        r.require(gj, p, "width_hz", gap.width_hz);
        r.require(gj, p, "weight", gap.weight);
        s.filter.gaps.push_back(gap);
      }
    }
  }

  if (r.has(doc, "reference")) {
    const json& rj = doc.at("reference");
    std::string type;
    r.require(rj, "reference.", "type", type);
    if (type == "zero") {
      s.reference.kind = ReferenceSettings::Kind::zero;
    } else if (type == "flat") {
      s.reference.kind = ReferenceSettings::Kind::flat;
      r.require(rj, "reference.", "f_start_hz", s.reference.f_start_hz);
      if (rj.contains("level") && !rj.at("level").is_null()) {
        const json& lv = rj.at("level");
        if (lv.is_string() && lv.get<std::string>() == "auto") {
          s.reference.level = std::nullopt;
        } else if (lv.is_number()) {
          s.reference.level = lv.get<double>();
        } else {
          errs.push_back(R"(reference.level: expected a number or "auto")");
        }
      }
    } else if (!type.empty()) {
      errs.push_back(R"(reference.type: expected "zero" or "flat")");
    }
  }

  if (r.has(doc, "pwm_baseline")) {
    const json& pj = doc.at("pwm_baseline");
    const std::string p = "pwm_baseline.";
    r.require(pj, p, "enabled", s.pwm.enabled);
    if (pj.contains("f_pwm_hz") && !pj.at("f_pwm_hz").is_null()) {
      const json& fj = pj.at("f_pwm_hz");
      if (fj.is_string() && fj.get<std::string>() == "auto") {
        s.pwm.f_pwm_hz = std::nullopt;
      } else if (fj.is_number()) {
        s.pwm.f_pwm_hz = fj.get<double>();
      } else {
        errs.push_back(p + R"(f_pwm_hz: expected a number or "auto")");
      }
    }
    r.optional_key(pj, p, "oversample", s.pwm.oversample);
  }

  if (doc.contains("events")) {
    if (!doc.at("events").is_array()) {
      errs.push_back("events: expected an array");
    } else {
      int i = 0;
      for (const auto& ej : doc.at("events")) {
        Event e;
        const std::string p = "events[" + std::to_string(i++) + "].";
        r.require(ej, p, "t_s", e.t_s);
        std::string type;
        r.require(ej, p, "type", type);
        if (type == "load_step") {
          e.kind = Event::Kind::load_step;
          if (ej.contains("load")) {
            e.load = parse_load(ej.at("load"), p + "load.", errs);
          } else {
            errs.push_back(p + "load: missing required key");
          }
        } else if (type == "gap_move") {
          e.kind = Event::Kind::gap_move;
          r.require(ej, p, "gap_index", e.gap_index);
          r.require(ej, p, "f_center_hz", e.gap_target_hz);
          r.optional_key(ej, p, "rate_hz_per_s", e.gap_rate_hz_per_s);
        } else if (type == "weight_change") {
          e.kind = Event::Kind::weight_change;
          r.optional_key(ej, p, "lambda1", e.lambda1);
          r.optional_key(ej, p, "lambda2", e.lambda2);
        } else if (type == "kmax_change") {
          e.kind = Event::Kind::kmax_change;
          if (ej.contains("k_max")) {
            e.k_max = parse_k_max(ej.at("k_max"), p + "k_max", errs);
          }
        } else if (!type.empty()) {
          errs.push_back(p + "type: unknown event type \"" + type + "\"");
        }
        s.events.push_back(e);
      }
    }
  }

  if (r.has(doc, "analysis")) {
    const json& aj = doc.at("analysis");
    const std::string p = "analysis.";
    r.optional_key(aj, p, "segment_length", s.analysis.segment_length);
    r.optional_key(aj, p, "overlap", s.analysis.overlap);
    r.optional_key(aj, p, "steady_state_fraction",
                   s.analysis.steady_state_fraction);
    r.optional_key(aj, p, "sfdr_neighborhood_bins",
                   s.analysis.sfdr_neighborhood);
    if (aj.contains("window")) {
      std::string w;
      r.assign(aj.at("window"), p + "window", w);
      if (w == "hann") {
        s.analysis.window = SpectralWindow::hann;
      } else if (w == "rectangular") {
        s.analysis.window = SpectralWindow::rectangular;
      } else if (!w.empty()) {
        errs.push_back(p + R"(window: expected "hann" or "rectangular")");
      }
    }
    if (aj.contains("distortion_band_hz")) {
      const json& b = aj.at("distortion_band_hz");
      if (b.is_array() && b.size() == 2 && b[0].is_number() &&
          b[1].is_number()) {
        s.analysis.distortion_band_hz =
            std::make_pair(b[0].get<double>(), b[1].get<double>());
      } else {
        errs.push_back(p + "distortion_band_hz: expected [lo_hz, hi_hz]");
      }
    }
    if (aj.contains("gap_metric")) {
      GapMetricSettings gm;
      const json& g = aj.at("gap_metric");
      r.optional_key(g, p + "gap_metric.", "gap_index", gm.gap_index);
      r.optional_key(g, p + "gap_metric.", "flank_width_hz",
                     gm.flank_width_hz);
      r.optional_key(g, p + "gap_metric.", "guard_hz", gm.guard_hz);
      s.analysis.gap_metric = gm;
    }
    if (aj.contains("spectrogram")) {
      const json& g = aj.at("spectrogram");
      const std::string q = p + "spectrogram.";
      r.optional_key(g, q, "enabled", s.analysis.spectrogram.enabled);
      r.optional_key(g, q, "window_length",
                     s.analysis.spectrogram.window_length);
      r.optional_key(g, q, "hop", s.analysis.spectrogram.hop);
    }
  }

  return result;
}

}  // namespace

ScenarioParseResult parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // map the byte offset to a line/column for usable diagnostics
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < json_text.size(); ++i) {
      if (json_text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::runtime_error("JSON parse error at line " +
                             std::to_string(line) + ", column " +
                             std::to_string(col) + ": " + e.what());
  }
  return parse_document(doc);
}

ScenarioParseResult load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> errs;
  if (s.schema_version != 1) {
    errs.push_back("schema_version: expected 1, got " +
                   std::to_string(s.schema_version));
  }
  if (s.name.empty()) errs.push_back("name: must not be empty");
  if (!(s.duration_s >= 0.0) || !std::isfinite(s.duration_s)) {
    errs.push_back("duration_s: must be finite and >= 0");
  }
  const auto& c = s.controller;
  if (!(c.fc_hz > 0.0)) errs.push_back("controller.fc_hz: must be positive");
  if (c.window_samples < 2) {
    errs.push_back("controller.window_samples: must be >= 2");
  }
  if (c.resync_interval < 1) {
    errs.push_back("controller.resync_interval: must be >= 1");
  }
  if (c.horizon_steps < 1 || c.horizon_steps > 8) {
    errs.push_back("controller.horizon_steps: must be in [1, 8]");
  }
  if (!(c.lambda1 >= 0.0) || !(c.lambda2 >= 0.0)) {
    errs.push_back("controller.lambda1/lambda2: must be >= 0");
  }
  if (c.k_max.has_value() && *c.k_max < 1) {
    errs.push_back("controller.k_max: must be >= 1 when finite");
  }
  if (c.dc_weight.has_value() &&
      (!(*c.dc_weight >= 0.0) || !std::isfinite(*c.dc_weight))) {
    errs.push_back("controller.dc_weight: must be finite and >= 0");
  }
  try {
    PlantParams p = s.plant;
    p.dt_s = c.fc_hz > 0.0 ? 1.0 / c.fc_hz : 1.0;
    p.validate();
  } catch (const std::exception& e) {
    errs.push_back(std::string("plant: ") + e.what());
  }
  if (!(s.output_control.vref_v > 0.0)) {
    errs.push_back("output_control.vref_v: must be positive");
  } else if (s.output_control.vref_v > s.plant.vin_v) {
    errs.push_back("output_control.vref_v: buck output cannot exceed vin_v");
  }
  for (auto& e : check_filter_spec(s.filter, c.fc_hz)) errs.push_back(e);
  if (s.reference.kind == ReferenceSettings::Kind::flat) {
    if (s.reference.f_start_hz < 0.0 ||
        s.reference.f_start_hz >= c.fc_hz / 2.0) {
      errs.push_back("reference.f_start_hz: must lie in [0, fc/2)");
    }
    if (s.reference.level.has_value() && !(*s.reference.level >= 0.0)) {
      errs.push_back("reference.level: must be >= 0");
    }
  }
  if (s.pwm.enabled) {
    if (s.pwm.oversample < 1) {
      errs.push_back("pwm_baseline.oversample: must be >= 1");
    }
    if (s.pwm.f_pwm_hz.has_value() &&
        *s.pwm.f_pwm_hz >= s.pwm.oversample * c.fc_hz / 2.0) {
      errs.push_back("pwm_baseline.f_pwm_hz: must stay below half the grid rate");
    }
  }
  double last_t = -1.0;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const auto& e = s.events[i];
    const std::string p = "events[" + std::to_string(i) + "].";
    if (e.t_s < last_t) errs.push_back(p + "t_s: events must be time-ordered");
    last_t = e.t_s;
    if (e.t_s < 0.0 || e.t_s > s.duration_s) {
      errs.push_back(p + "t_s: outside [0, duration_s]");
    }
    switch (e.kind) {
      case Event::Kind::load_step:
        if (e.load.kind == LoadModel::Kind::resistance &&
            !(e.load.value > 0.0)) {
          errs.push_back(p + "load.ohm: must be positive");
        }
        break;
      case Event::Kind::gap_move: {
        if (e.gap_index < 0 ||
            e.gap_index >= static_cast<int>(s.filter.gaps.size())) {
          errs.push_back(p + "gap_index: no such gap");
        } else {
          const double w =
              s.filter.gaps[static_cast<std::size_t>(e.gap_index)].width_hz;
          if (e.gap_target_hz - w / 2.0 <= 0.0 ||
              e.gap_target_hz + w / 2.0 >= c.fc_hz / 2.0) {
            errs.push_back(p + "f_center_hz: moved band leaves (0, fc/2)");
          }
        }
        if (e.gap_rate_hz_per_s < 0.0) {
          errs.push_back(p + "rate_hz_per_s: must be >= 0");
        }
        break;
      }
      case Event::Kind::weight_change:
        if ((e.lambda1.has_value() && !(*e.lambda1 >= 0.0)) ||
            (e.lambda2.has_value() && !(*e.lambda2 >= 0.0))) {
          errs.push_back(p + "lambda: must be >= 0");
        }
        break;
      case Event::Kind::kmax_change:
        if (e.k_max.has_value() && *e.k_max < 1) {
          errs.push_back(p + "k_max: must be >= 1 when finite");
        }
        break;
    }
  }
  const auto& a = s.analysis;
  if (a.segment_length < 0) {
    errs.push_back("analysis.segment_length: must be >= 0 (0 = window)");
  }
  if (!(a.overlap >= 0.0 && a.overlap < 1.0)) {
    errs.push_back("analysis.overlap: must be in [0, 1)");
  }
  if (!(a.steady_state_fraction >= 0.0 && a.steady_state_fraction < 1.0)) {
    errs.push_back("analysis.steady_state_fraction: must be in [0, 1)");
  }
  if (a.distortion_band_hz.has_value() &&
      !(a.distortion_band_hz->second > a.distortion_band_hz->first)) {
    errs.push_back("analysis.distortion_band_hz: empty band");
  }
  if (a.gap_metric.has_value()) {
    if (a.gap_metric->gap_index < 0 ||
        a.gap_metric->gap_index >= static_cast<int>(s.filter.gaps.size())) {
      errs.push_back("analysis.gap_metric.gap_index: no such gap");
    }
    if (!(a.gap_metric->flank_width_hz > 0.0)) {
      errs.push_back("analysis.gap_metric.flank_width_hz: must be positive");
    }
  }
  if (a.spectrogram.enabled &&
      (a.spectrogram.window_length < 2 || a.spectrogram.hop < 1)) {
    errs.push_back("analysis.spectrogram: bad window_length/hop");
  }
  return errs;
}

std::string scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["schema_version"] = s.schema_version;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["duration_s"] = s.duration_s;
  j["seed"] = s.seed;

  ordered_json c;
  c["fc_hz"] = s.controller.fc_hz;
  c["window_samples"] = s.controller.window_samples;
  c["resync_interval"] = s.controller.resync_interval;
  c["horizon_steps"] = s.controller.horizon_steps;
  c["lambda1"] = s.controller.lambda1;
  c["lambda2"] = s.controller.lambda2;
  c["norm"] = norm_name(s.controller.norm);
  if (s.controller.k_max.has_value()) {
    c["k_max"] = *s.controller.k_max;
  } else {
    c["k_max"] = "inf";
  }
  if (s.controller.dc_weight.has_value()) {
    c["dc_weight"] = *s.controller.dc_weight;
  } else {
    c["dc_weight"] = "auto";
  }
  j["controller"] = c;

  ordered_json p;
  p["vin_v"] = s.plant.vin_v;
  p["inductance_h"] = s.plant.inductance_h;
  p["capacitance_f"] = s.plant.capacitance_f;
  p["series_resistance_ohm"] = s.plant.series_resistance_ohm;
  p["load"] = load_to_json(s.plant.load);
  j["plant"] = p;

  ordered_json o;
  o["vref_v"] = s.output_control.vref_v;
  if (s.output_control.kp.has_value()) o["kp"] = *s.output_control.kp;
  if (s.output_control.ki.has_value()) o["ki"] = *s.output_control.ki;
  j["output_control"] = o;

  ordered_json f;
  f["segments"] = ordered_json::array();
  for (const auto& seg : s.filter.segments) {
    ordered_json sj;
    sj["f_start_hz"] = seg.f_start_hz;
    sj["f_end_hz"] = seg.f_end_hz;
    sj["shape"] = seg.shape == SegmentShape::constant     ? "constant"
                  : seg.shape == SegmentShape::linear_in_f ? "linear_in_f"
                                                           : "inverse_in_f";
    sj["magnitude"] = seg.magnitude;
    f["segments"].push_back(sj);
  }
  f["gaps"] = ordered_json::array();
  for (const auto& gap : s.filter.gaps) {
    ordered_json gj;
    gj["f_center_hz"] = gap.f_center_hz;
    gj["width_hz"] = gap.width_hz;
    gj["weight"] = gap.weight;
    f["gaps"].push_back(gj);
  }
  j["filter"] = f;

  ordered_json ref;
  if (s.reference.kind == ReferenceSettings::Kind::zero) {
    ref["type"] = "zero";
  } else {
    ref["type"] = "flat";
    ref["f_start_hz"] = s.reference.f_start_hz;
    if (s.reference.level.has_value()) {
      ref["level"] = *s.reference.level;
    } else {
      ref["level"] = "auto";
    }
  }
  j["reference"] = ref;

  ordered_json pwm;
  pwm["enabled"] = s.pwm.enabled;
  if (s.pwm.f_pwm_hz.has_value()) {
    pwm["f_pwm_hz"] = *s.pwm.f_pwm_hz;
  } else {
    pwm["f_pwm_hz"] = "auto";
  }
  pwm["oversample"] = s.pwm.oversample;
  j["pwm_baseline"] = pwm;

  j["events"] = ordered_json::array();
  for (const auto& e : s.events) {
    ordered_json ej;
    ej["t_s"] = e.t_s;
    switch (e.kind) {
      case Event::Kind::load_step:
        ej["type"] = "load_step";
        ej["load"] = load_to_json(e.load);
        break;
      case Event::Kind::gap_move:
        ej["type"] = "gap_move";
        ej["gap_index"] = e.gap_index;
        ej["f_center_hz"] = e.gap_target_hz;
        ej["rate_hz_per_s"] = e.gap_rate_hz_per_s;
        break;
      case Event::Kind::weight_change:
        ej["type"] = "weight_change";
        if (e.lambda1.has_value()) ej["lambda1"] = *e.lambda1;
        if (e.lambda2.has_value()) ej["lambda2"] = *e.lambda2;
        break;
      case Event::Kind::kmax_change:
        ej["type"] = "kmax_change";
        if (e.k_max.has_value()) {
          ej["k_max"] = *e.k_max;
        } else {
          ej["k_max"] = "inf";
        }
        break;
    }
    j["events"].push_back(ej);
  }

  ordered_json a;
  a["segment_length"] = s.analysis.segment_length;
  a["overlap"] = s.analysis.overlap;
  a["window"] =
      s.analysis.window == SpectralWindow::hann ? "hann" : "rectangular";
  a["steady_state_fraction"] = s.analysis.steady_state_fraction;
  a["sfdr_neighborhood_bins"] = s.analysis.sfdr_neighborhood;
  if (s.analysis.distortion_band_hz.has_value()) {
    a["distortion_band_hz"] = {s.analysis.distortion_band_hz->first,
                               s.analysis.distortion_band_hz->second};
  }
  if (s.analysis.gap_metric.has_value()) {
    ordered_json g;
    g["gap_index"] = s.analysis.gap_metric->gap_index;
    g["flank_width_hz"] = s.analysis.gap_metric->flank_width_hz;
    g["guard_hz"] = s.analysis.gap_metric->guard_hz;
    a["gap_metric"] = g;
  }
  if (s.analysis.spectrogram.enabled) {
    ordered_json g;
    g["enabled"] = true;
    g["window_length"] = s.analysis.spectrogram.window_length;
    g["hop"] = s.analysis.spectrogram.hop;
    a["spectrogram"] = g;
  }
  j["analysis"] = a;

  return j.dump(2) + "\n";
}

}  // namespace specmpc
