#include "specmpc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specmpc {

namespace {

namespace fs = std::filesystem;

// shortest round-trip representation keeps files byte-reproducible
std::string fmt(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void write_main_trace(const std::string& path, const RunArtifacts& a,
                      TraceFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double dt = a.dt_s();
  if (format == TraceFormat::csv) {
    out << "t_s,switch,vc_v,il_a,duty\n";
    for (std::size_t i = 0; i < a.switch_trace.size(); ++i) {
      out << fmt(static_cast<double>(i) * dt) << ','
          << static_cast<int>(a.switch_trace[i]) << ',' << fmt(a.vc_trace[i])
          << ',' << fmt(a.il_trace[i]) << ',' << fmt(a.duty_trace[i]) << '\n';
    }
  } else {
    for (std::size_t i = 0; i < a.switch_trace.size(); ++i) {
      out << R"({"t_s":)" << fmt(static_cast<double>(i) * dt)
          << R"(,"switch":)" << static_cast<int>(a.switch_trace[i])
          << R"(,"vc_v":)" << fmt(a.vc_trace[i]) << R"(,"il_a":)"
          << fmt(a.il_trace[i]) << R"(,"duty":)" << fmt(a.duty_trace[i])
          << "}\n";
    }
  }
}

void write_pwm_trace(const std::string& path, const PwmRun& p,
                     TraceFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double dt = 1.0 / p.sample_hz;
  if (format == TraceFormat::csv) {
    out << "t_s,switch,vc_v,il_a\n";
    for (std::size_t i = 0; i < p.switch_trace.size(); ++i) {
      out << fmt(static_cast<double>(i) * dt) << ','
          << static_cast<int>(p.switch_trace[i]) << ',' << fmt(p.vc_trace[i])
          << ',' << fmt(p.il_trace[i]) << '\n';
    }
  } else {
    for (std::size_t i = 0; i < p.switch_trace.size(); ++i) {
      out << R"({"t_s":)" << fmt(static_cast<double>(i) * dt)
          << R"(,"switch":)" << static_cast<int>(p.switch_trace[i])
          << R"(,"vc_v":)" << fmt(p.vc_trace[i]) << R"(,"il_a":)"
          << fmt(p.il_trace[i]) << "}\n";
    }
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_spectrum_csv(const std::string& path, const PowerSpectrum& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "freq_hz,power_db\n";
  const auto db = spec.power_db();
  for (std::size_t i = 0; i < spec.freq_hz.size(); ++i) {
    out << fmt(spec.freq_hz[i]) << ',' << fmt(db[i]) << '\n';
  }
}

void write_spectrogram_csv(const std::string& path, const Spectrogram& gram) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "freq_hz";
  for (double t : gram.time_s) out << ',' << fmt(t);
  out << '\n';
  for (int row = 0; row < gram.rows; ++row) {
    out << fmt(gram.freq_hz[static_cast<std::size_t>(row)]);
    for (int col = 0; col < gram.cols; ++col) {
      const double p = gram.at(col, row);
      out << ',' << fmt(p > 0.0 ? 10.0 * std::log10(p) : -120.0);
    }
    out << '\n';
  }
}

RunMetrics write_run_artifacts(const std::string& dir,
                               const RunArtifacts& artifacts,
                               TraceFormat format) {
  fs::create_directories(dir);
  const std::string ext = format == TraceFormat::csv ? ".csv" : ".jsonl";
  write_text_file(dir + "/scenario.json",
                  scenario_to_json(artifacts.scenario));
  write_main_trace(dir + "/trace" + ext, artifacts, format);
  if (artifacts.pwm.has_value()) {
    write_pwm_trace(dir + "/pwm_trace" + ext, *artifacts.pwm, format);
  }
  if (!artifacts.gap_center_trace.empty()) {
    std::ofstream out(dir + "/gap_center.csv");
    out << "t_s,f_center_hz\n";
    for (const auto& [t, f] : artifacts.gap_center_trace) {
      out << fmt(t) << ',' << fmt(f) << '\n';
    }
  }

  const RunMetrics metrics = compute_metrics(artifacts);
  const auto& sc = artifacts.scenario;
  const int segment = sc.analysis.segment_length > 0
                          ? sc.analysis.segment_length
                          : sc.controller.window_samples;
  const auto steady = static_cast<std::size_t>(
      static_cast<double>(artifacts.switch_trace.size()) *
      (1.0 - sc.analysis.steady_state_fraction));
  if (static_cast<int>(steady) >= segment) {
    write_spectrum_csv(dir + "/spectrum_switch.csv",
                       switch_spectrum(artifacts));
  }
  if (artifacts.pwm.has_value() &&
      static_cast<int>(artifacts.pwm->switch_trace.size() *
                       (1.0 - sc.analysis.steady_state_fraction)) >=
          segment * sc.pwm.oversample) {
    write_spectrum_csv(dir + "/spectrum_pwm.csv", pwm_spectrum(artifacts));
  }
  if (sc.analysis.spectrogram.enabled &&
      static_cast<int>(artifacts.switch_trace.size()) >=
          sc.analysis.spectrogram.window_length) {
    std::vector<double> sw(artifacts.switch_trace.begin(),
                           artifacts.switch_trace.end());
    write_spectrogram_csv(
        dir + "/spectrogram_switch.csv",
        spectrogram(sw, sc.controller.fc_hz,
                    sc.analysis.spectrogram.window_length,
                    sc.analysis.spectrogram.hop));
  }
  write_text_file(dir + "/metrics.json",
                  metrics_to_json(metrics, artifacts.scenario));
  return metrics;
}

RunArtifacts read_run_artifacts(const std::string& dir) {
  RunArtifacts out;
  {
    std::ifstream in(dir + "/scenario.json");
    if (!in) {
      throw std::runtime_error("read_run_artifacts: missing scenario.json in " +
                               dir);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto parsed = parse_scenario(buf.str());
    if (!parsed.diagnostics.empty()) {
      throw std::runtime_error(
          "read_run_artifacts: stored scenario.json is invalid: " +
          parsed.diagnostics.front());
    }
    out.scenario = parsed.scenario;
  }

  const bool jsonl = fs::exists(dir + "/trace.jsonl");
  const std::string trace_path =
      jsonl ? dir + "/trace.jsonl" : dir + "/trace.csv";
  std::ifstream in(trace_path);
  if (!in) {
    throw std::runtime_error("read_run_artifacts: missing trace in " + dir);
  }
  if (jsonl) {
    // minimal field scan; columns are fixed by the writer
    std::string line;
    while (std::getline(in, line)) {
      double t, vc, il, duty;
      int sw;
      if (std::sscanf(line.c_str(),
                      R"({"t_s":%lf,"switch":%d,"vc_v":%lf,"il_a":%lf,"duty":%lf})",
                      &t, &sw, &vc, &il, &duty) == 5) {
        out.switch_trace.push_back(static_cast<std::int8_t>(sw));
        out.vc_trace.push_back(vc);
        out.il_trace.push_back(il);
        out.duty_trace.push_back(duty);
      }
    }
  } else {
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      auto cols = split(line, ',');
      if (cols.size() != 5) continue;
      out.switch_trace.push_back(
          static_cast<std::int8_t>(std::stoi(cols[1])));
      out.vc_trace.push_back(std::stod(cols[2]));
      out.il_trace.push_back(std::stod(cols[3]));
      out.duty_trace.push_back(std::stod(cols[4]));
    }
  }

  for (const char* name : {"/pwm_trace.csv", "/pwm_trace.jsonl"}) {
    std::ifstream pin(dir + name);
    if (!pin) continue;
    PwmRun pwm;
    pwm.sample_hz =
        out.scenario.pwm.oversample * out.scenario.controller.fc_hz;
    std::string line;
    const bool pj = std::string(name).ends_with(".jsonl");
    if (!pj) std::getline(pin, line);
    while (std::getline(pin, line)) {
      if (pj) {
        double t, vc, il;
        int sw;
        if (std::sscanf(line.c_str(),
                        R"({"t_s":%lf,"switch":%d,"vc_v":%lf,"il_a":%lf})", &t,
                        &sw, &vc, &il) == 4) {
          pwm.switch_trace.push_back(static_cast<std::int8_t>(sw));
          pwm.vc_trace.push_back(vc);
          pwm.il_trace.push_back(il);
        }
      } else {
        auto cols = split(line, ',');
        if (cols.size() != 4) continue;
        pwm.switch_trace.push_back(
            static_cast<std::int8_t>(std::stoi(cols[1])));
        pwm.vc_trace.push_back(std::stod(cols[2]));
        pwm.il_trace.push_back(std::stod(cols[3]));
      }
    }
    if (!pwm.switch_trace.empty()) out.pwm = std::move(pwm);
    break;
  }

  std::ifstream gin(dir + "/gap_center.csv");
  if (gin) {
    std::string line;
    std::getline(gin, line);
    while (std::getline(gin, line)) {
      auto cols = split(line, ',');
      if (cols.size() != 2) continue;
      out.gap_center_trace.emplace_back(std::stod(cols[0]),
                                        std::stod(cols[1]));
    }
  }
  return out;
}

}  // namespace specmpc
