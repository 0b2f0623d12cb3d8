// specmpc: scenario-driven simulation of predictive spectral control for a
// synchronous buck converter. Subcommands: run, sweep, validate, analyze.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specmpc/io.hpp"
#include "specmpc/metrics.hpp"
#include "specmpc/runner.hpp"

namespace {

using namespace specmpc;

int report_diagnostics(const std::string& what,
                       const std::vector<std::string>& diags) {
  std::cerr << what << ":\n";
  for (const auto& d : diags) std::cerr << "  " << d << "\n";
  return 2;
}

Scenario load_or_exit(const std::string& path) {
  auto parsed = load_scenario_file(path);
  std::vector<std::string> diags = parsed.diagnostics;
  if (diags.empty()) {
    auto sem = validate_scenario(parsed.scenario);
    diags.insert(diags.end(), sem.begin(), sem.end());
  }
  if (!diags.empty()) {
    std::exit(report_diagnostics("invalid scenario " + path, diags));
  }
  return parsed.scenario;
}

TraceFormat parse_format(const std::string& name) {
  if (name == "jsonl") return TraceFormat::jsonl;
  return TraceFormat::csv;
}

void print_summary(const std::string& label, const RunMetrics& m) {
  std::cout << label << ": mean_vc=" << m.mean_vc_v
            << " V, f_sw_avg=" << m.avg_switching_hz / 1e3 << " kHz";
  if (m.sfdr_db.has_value()) std::cout << ", sfdr=" << *m.sfdr_db << " dB";
  if (m.gap_depth_db.has_value()) {
    std::cout << ", gap_depth=" << *m.gap_depth_db << " dB";
  }
  std::cout << "\n";
}

std::string csv_cell(const std::optional<double>& v) {
  return v.has_value() ? std::to_string(*v) : "";
}

int cmd_run(const std::string& scenario_path, const std::string& output,
            std::optional<std::uint64_t> seed, const std::string& format) {
  Scenario sc = load_or_exit(scenario_path);
  RunArtifacts artifacts = run_scenario(sc, seed);
  const RunMetrics metrics =
      write_run_artifacts(output, artifacts, parse_format(format));
  print_summary(sc.name, metrics);
  std::cout << "artifacts written to " << output << "\n";
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& output,
              const std::string& param_name,
              const std::vector<std::string>& values,
              std::optional<std::uint64_t> seed, int threads,
              const std::string& format) {
  Scenario base = load_or_exit(scenario_path);
  auto param = sweep_parameter_from_name(param_name);
  if (!param.has_value()) {
    std::cerr << "unknown sweep parameter \"" << param_name
              << "\" (expected lambda2, M or k_max)\n";
    return 2;
  }
  if (values.empty()) {
    std::cerr << "sweep needs at least one value\n";
    return 2;
  }
  // resolve a shared auto reference once so all points see the same target
  resolve_auto_reference(base);
  auto points = make_sweep(base, *param, values);
  for (auto& pt : points) {
    auto diags = validate_scenario(pt.scenario);
    if (!diags.empty()) {
      return report_diagnostics("invalid sweep point " + pt.label, diags);
    }
  }
  auto results = run_sweep(points, threads, seed);

  std::filesystem::create_directories(output);
  std::ostringstream agg;
  agg << "point,avg_switching_hz,distortion_power,ripple_variance_v2,"
         "ripple_p2p_v,sfdr_db,gap_depth_db,mean_vc_v,max_hold_run\n";
  bool any_failed = false;
  for (const auto& res : results) {
    if (!res.artifacts.has_value()) {
      any_failed = true;
      if (!res.error.empty()) {
        std::cerr << "point " << res.label << " failed: " << res.error << "\n";
      } else {
        std::cerr << "point " << res.label << " skipped (sweep aborted)\n";
      }
      continue;
    }
    const RunMetrics m = write_run_artifacts(
        output + "/" + res.label, *res.artifacts, parse_format(format));
    print_summary(res.label, m);
    agg << res.label << ',' << m.avg_switching_hz << ','
        << csv_cell(m.distortion_power) << ',' << m.ripple_variance_v2 << ','
        << m.ripple_p2p_v << ',' << csv_cell(m.sfdr_db) << ','
        << csv_cell(m.gap_depth_db) << ',' << m.mean_vc_v << ','
        << m.max_hold_run << '\n';
  }
  write_text_file(output + "/aggregate.csv", agg.str());
  std::cout << "aggregate written to " << output << "/aggregate.csv\n";
  return any_failed ? 1 : 0;
}

int cmd_validate(const std::string& scenario_path) {
  ScenarioParseResult parsed;
  try {
    parsed = load_scenario_file(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::vector<std::string> diags = parsed.diagnostics;
  if (diags.empty()) {
    auto sem = validate_scenario(parsed.scenario);
    diags.insert(diags.end(), sem.begin(), sem.end());
  }
  if (!diags.empty()) {
    return report_diagnostics(scenario_path, diags);
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_analyze(const std::string& run_dir, const std::string& output) {
  RunArtifacts artifacts = read_run_artifacts(run_dir);
  const std::string out = output.empty() ? run_dir : output;
  std::filesystem::create_directories(out);
  const RunMetrics metrics = compute_metrics(artifacts);
  write_text_file(out + "/metrics.json",
                  metrics_to_json(metrics, artifacts.scenario));
  const auto& sc = artifacts.scenario;
  const int segment = sc.analysis.segment_length > 0
                          ? sc.analysis.segment_length
                          : sc.controller.window_samples;
  if (static_cast<int>(artifacts.switch_trace.size() *
                       (1.0 - sc.analysis.steady_state_fraction)) >= segment) {
    write_spectrum_csv(out + "/spectrum_switch.csv",
                       switch_spectrum(artifacts));
  }
  if (artifacts.pwm.has_value()) {
    write_spectrum_csv(out + "/spectrum_pwm.csv", pwm_spectrum(artifacts));
  }
  if (sc.analysis.spectrogram.enabled &&
      static_cast<int>(artifacts.switch_trace.size()) >=
          sc.analysis.spectrogram.window_length) {
    std::vector<double> sw(artifacts.switch_trace.begin(),
                           artifacts.switch_trace.end());
    write_spectrogram_csv(
        out + "/spectrogram_switch.csv",
        spectrogram(sw, sc.controller.fc_hz,
                    sc.analysis.spectrogram.window_length,
                    sc.analysis.spectrogram.hop));
  }
  print_summary(sc.name, metrics);
  std::cout << "analysis written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"predictive spectral control of a synchronous buck converter"};
  app.require_subcommand(1);

  std::string scenario_path, output = "out", format = "csv", param;
  std::vector<std::string> values;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_value = 0;
  int threads = 1;
  std::string run_dir, analyze_output;

  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--output,-o", output, "output directory");
  auto* run_seed = run->add_option("--seed", seed_value, "override PRNG seed");
  run->add_option("--format", format, "trace format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("scenario", scenario_path, "base scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "lambda2 | M | k_max")->required();
  sweep->add_option("--values", values, "comma separated value list")
      ->required()
      ->delimiter(',');
  sweep->add_option("--output,-o", output, "output directory");
  auto* sweep_seed =
      sweep->add_option("--seed", seed_value, "override PRNG seed");
  sweep->add_option("--threads", threads, "parallel sweep workers")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--format", format, "trace format")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  auto* analyze =
      app.add_subcommand("analyze", "recompute metrics from stored traces");
  analyze->add_option("run_dir", run_dir, "directory written by run")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze->add_option("--output,-o", analyze_output,
                      "output directory (default: run_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run_seed->count() > 0) seed = seed_value;
      return cmd_run(scenario_path, output, seed, format);
    }
    if (sweep->parsed()) {
      if (sweep_seed->count() > 0) seed = seed_value;
      return cmd_sweep(scenario_path, output, param, values, seed, threads,
                       format);
    }
    if (validate->parsed()) {
      return cmd_validate(scenario_path);
    }
    if (analyze->parsed()) {
      return cmd_analyze(run_dir, analyze_output);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
